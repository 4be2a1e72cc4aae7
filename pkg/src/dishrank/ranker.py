"""The attention ranker: dish embeddings, one self-attention pass, scores.

Each dish is represented by the mean of its word embeddings plus the
embedding of the active search key.  A single scaled-dot-product attention
layer lets every dish see the rest of the menu, and a linear head turns
the contextualised rows into one score per dish.  Ranking reads the scores
in descending order; there is no positional encoding, so the model is a
set function and permutation-equivariant by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from . import autodiff as ad
from .autodiff import Array, ContractError, Tensor2
from .encoding import PAD_INDEX, MenuTensor

INIT_SPAN = 0.1

# Persisted block order; model files rely on it staying stable.
ARRAY_NAMES = (
    "word_embeddings",
    "key_embeddings",
    "w_query",
    "b_query",
    "w_key",
    "b_key",
    "w_value",
    "b_value",
    "w_score",
    "b_score",
)


class UnknownKeyError(ValueError):
    """Search-key id or name outside the trained set."""


@dataclass(frozen=True)
class RankerConfig:
    vocab_size: int
    num_keys: int = 1
    embed_dim: int = 32

    def __post_init__(self):
        if self.vocab_size < 2:
            raise ValueError(f"vocab_size must cover PAD and UNK, got {self.vocab_size}")
        if self.num_keys < 1:
            raise ValueError(f"num_keys must be >= 1, got {self.num_keys}")
        if self.embed_dim < 4:
            raise ValueError(f"embed_dim must be >= 4, got {self.embed_dim}")


def _array_shapes(config: RankerConfig) -> dict[str, tuple[int, int]]:
    d = config.embed_dim
    return {
        "word_embeddings": (config.vocab_size, d),
        "key_embeddings": (config.num_keys, d),
        "w_query": (d, d),
        "b_query": (1, d),
        "w_key": (d, d),
        "b_key": (1, d),
        "w_value": (d, d),
        "b_value": (1, d),
        "w_score": (d, 1),
        "b_score": (1, 1),
    }


@dataclass
class RankerParams:
    """All learnable arrays.  The PAD embedding row stays pinned to zero."""

    word_embeddings: Array
    key_embeddings: Array
    w_query: Array
    b_query: Array
    w_key: Array
    b_key: Array
    w_value: Array
    b_value: Array
    w_score: Array
    b_score: Array

    @classmethod
    def initialize(cls, config: RankerConfig, seed: int = 0) -> "RankerParams":
        rng = np.random.default_rng(seed)
        arrays = {
            name: rng.uniform(-INIT_SPAN, INIT_SPAN, size=shape)
            for name, shape in _array_shapes(config).items()
        }
        arrays["word_embeddings"][PAD_INDEX] = 0.0
        return cls(**arrays)

    @property
    def vocab_size(self) -> int:
        return self.word_embeddings.shape[0]

    @property
    def num_keys(self) -> int:
        return self.key_embeddings.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.word_embeddings.shape[1]

    def config(self) -> RankerConfig:
        return RankerConfig(vocab_size=self.vocab_size, num_keys=self.num_keys, embed_dim=self.embed_dim)

    def as_dict(self) -> dict[str, Array]:
        return {name: getattr(self, name) for name in ARRAY_NAMES}

    @classmethod
    def from_dict(cls, arrays: dict[str, Array]) -> "RankerParams":
        return cls(**{name: np.asarray(arrays[name], dtype=np.float64) for name in ARRAY_NAMES})

    def copy(self) -> "RankerParams":
        return RankerParams(**{f.name: getattr(self, f.name).copy() for f in fields(self)})


@dataclass(frozen=True, eq=False)
class RankOutput:
    """Scores (masked rows forced to -inf), the ranking, and the attention map."""

    scores: Array  # (M,)
    permutation: Array  # (dish_count,) best first
    attention: Array  # (M, M)


def leaf_nodes(params: RankerParams) -> dict[str, Tensor2]:
    """Wrap every parameter array as a differentiable graph leaf."""
    return {name: ad.parameter(arr) for name, arr in params.as_dict().items()}


def _frozen_nodes(params: RankerParams) -> dict[str, Tensor2]:
    # Inference-only wrapping: no tape gets recorded.
    return {name: ad.constant(arr) for name, arr in params.as_dict().items()}


def _check_key(key: int, num_keys: int) -> int:
    key = int(key)
    if not 0 <= key < num_keys:
        raise UnknownKeyError(f"search key id {key} outside [0, {num_keys})")
    return key


def _mean_weights(menu: MenuTensor) -> Array:
    """(M, 3M) matrix averaging each dish's non-PAD word rows."""
    m = menu.height
    non_pad = menu.indices != PAD_INDEX  # (M, 3)
    counts = np.maximum(non_pad.sum(axis=1), 1)
    weights = np.zeros((m, 3 * m))
    rows = np.repeat(np.arange(m), 3)
    cols = np.arange(3 * m)
    weights[rows, cols] = (non_pad / counts[:, None]).reshape(-1)
    return weights


def embedding_graph(menu: MenuTensor, key: int, nodes: dict[str, Tensor2]) -> Tensor2:
    """Dish representations: mean of non-PAD word embeddings + key embedding."""
    key = _check_key(key, nodes["key_embeddings"].rows)
    gathered = ad.gather_rows(nodes["word_embeddings"], menu.indices.reshape(-1))
    mean = ad.matmul(ad.constant(_mean_weights(menu)), gathered)
    key_row = ad.gather_rows(nodes["key_embeddings"], [key])
    return ad.add_row(mean, key_row)


def attention_graph(h: Tensor2, mask: Array, nodes: dict[str, Tensor2]) -> tuple[Tensor2, Tensor2]:
    """One scaled-dot-product attention pass over the masked menu."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (h.rows,):
        raise ad.DimensionError(f"mask of shape {mask.shape} does not match {h.rows} dishes")
    if not mask.any():
        raise ContractError("attention over an all-masked menu")
    q = ad.add_row(ad.matmul(h, nodes["w_query"]), nodes["b_query"])
    k = ad.add_row(ad.matmul(h, nodes["w_key"]), nodes["b_key"])
    v = ad.add_row(ad.matmul(h, nodes["w_value"]), nodes["b_value"])
    logits = ad.scale(ad.matmul(q, ad.transpose(k)), 1.0 / math.sqrt(h.cols))
    column_mask = np.where(mask, 0.0, -np.inf)[None, :].repeat(h.rows, axis=0)
    weights = ad.softmax_rows(ad.add(logits, ad.constant(column_mask)))
    return ad.matmul(weights, v), weights


def score_graph(y: Tensor2, nodes: dict[str, Tensor2]) -> Tensor2:
    """Linear head: one scalar per contextualised dish row."""
    return ad.add_row(ad.matmul(y, nodes["w_score"]), nodes["b_score"])


def ranker_graph(menu: MenuTensor, key: int, nodes: dict[str, Tensor2]) -> tuple[Tensor2, Tensor2]:
    """Full differentiable pipeline; returns (scores (M,1), attention (M,M))."""
    h = embedding_graph(menu, key, nodes)
    y, weights = attention_graph(h, menu.mask, nodes)
    return score_graph(y, nodes), weights


def embed_menu(menu: MenuTensor, key: int, params: RankerParams) -> Array:
    return embedding_graph(menu, key, _frozen_nodes(params)).data


def self_attention(h: Array, mask, params: RankerParams) -> Array:
    y, _ = attention_graph(ad.constant(h), np.asarray(mask, dtype=bool), _frozen_nodes(params))
    return y.data


def score_dishes(y: Array, mask, params: RankerParams) -> Array:
    """Scores with masked positions forced to the -inf sentinel."""
    mask = np.asarray(mask, dtype=bool)
    scores = score_graph(ad.constant(y), _frozen_nodes(params)).data[:, 0].copy()
    scores[~mask] = -np.inf
    return scores


def rank(scores: Array, mask) -> Array:
    """Valid dish indices by descending score; ties keep input order."""
    scores = np.asarray(scores, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if scores.shape != mask.shape:
        raise ad.DimensionError(f"rank: scores shape {scores.shape} vs mask shape {mask.shape}")
    if not mask.any():
        raise ContractError("rank needs at least one valid dish")
    order = np.argsort(-scores, kind="stable")
    return np.array([i for i in order if mask[i]], dtype=np.int64)


def forward(menu: MenuTensor, key: int, params: RankerParams) -> RankOutput:
    """Embed, contextualise, score, and rank one menu."""
    scores_node, weights = ranker_graph(menu, key, _frozen_nodes(params))
    scores = scores_node.data[:, 0].copy()
    scores[~menu.mask] = -np.inf
    return RankOutput(scores=scores, permutation=rank(scores, menu.mask), attention=weights.data)
