"""Training loop and split evaluation for the attention ranker.

Training minimises the mean pairwise loss with Adam.  A batch is a group
of menus: per-sample gradients are averaged, one optimizer step is taken
per batch, and the PAD embedding row is kept frozen at zero.  Everything
is driven by explicit seeds, so a rerun reproduces the parameters bit for
bit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .autodiff import backward
from .datagen import MenuSample
from .encoding import MenuTensor, Vocabulary, pack_menu
from .metrics import ndcg, pairwise_accuracy, pairwise_cross_entropy, pairwise_loss
from .model import RankerModel
from .optim import AdamState, adam_step
from .ranker import RankerConfig, RankerParams, leaf_nodes, rank, ranker_graph


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite; message names the epoch and batch."""

    def __init__(self, epoch: int, batch: int, value: float):
        super().__init__(f"training diverged at epoch {epoch}, batch {batch}: loss={value}")
        self.epoch = epoch
        self.batch = batch


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0
    keys: tuple[str, ...] = ("calories",)

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not self.keys:
            raise ValueError("keys must name at least one search key")


@dataclass(frozen=True)
class MetricsReport:
    """Mean NDCG / CEL / pairwise accuracy over one test split."""

    ndcg: float
    cel: float
    acc: float
    split_name: str
    n_menus: int

    def to_json_dict(self) -> dict:
        return {
            "ndcg": self.ndcg,
            "cel": self.cel,
            "acc": self.acc,
            "split_name": self.split_name,
            "n_menus": self.n_menus,
        }


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_ndcg: float | None = None
    val_cel: float | None = None
    val_acc: float | None = None


@dataclass(frozen=True, eq=False)
class _Prepared:
    menu: MenuTensor
    key_id: int
    truth: np.ndarray


def _prepare(samples: Sequence[MenuSample], vocab: Vocabulary, key_ids: dict[str, int]) -> list[_Prepared]:
    prepared = []
    for sample in samples:
        if sample.key not in key_ids:
            raise ValueError(f"sample menu_id={sample.menu_id} uses key {sample.key!r} outside {sorted(key_ids)}")
        prepared.append(
            _Prepared(
                menu=pack_menu(sample.dish_names, vocab),
                key_id=key_ids[sample.key],
                truth=np.asarray(sample.truth, dtype=np.int64),
            )
        )
    return prepared


def train(
    config: TrainConfig,
    train_samples: Sequence[MenuSample],
    vocab: Vocabulary,
    val_samples: Sequence[MenuSample] | None = None,
    ranker_config: RankerConfig | None = None,
) -> tuple[RankerModel, list[EpochStats]]:
    """Fit the ranker; returns the trained model and per-epoch history."""
    if not train_samples:
        raise ValueError("training set is empty")

    key_ids = {key: i for i, key in enumerate(config.keys)}
    if ranker_config is None:
        ranker_config = RankerConfig(vocab_size=vocab.size, num_keys=len(config.keys))
    if ranker_config.vocab_size != vocab.size or ranker_config.num_keys != len(config.keys):
        raise ValueError("ranker_config disagrees with the vocabulary or key list")

    prepared = _prepare(train_samples, vocab, key_ids)
    params = RankerParams.initialize(ranker_config, seed=config.seed)
    state = AdamState.for_params(params.as_dict())
    shuffle_rng = np.random.default_rng((config.seed, 0x5D1F))

    history: list[EpochStats] = []
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(prepared))
        epoch_loss = 0.0
        for batch_index, start in enumerate(range(0, len(order), config.batch_size)):
            batch = order[start : start + config.batch_size]
            accum = {name: np.zeros_like(arr) for name, arr in params.as_dict().items()}
            inv = 1.0 / len(batch)
            for sample_index in batch:
                item = prepared[sample_index]
                nodes = leaf_nodes(params)
                scores, _ = ranker_graph(item.menu, item.key_id, nodes)
                loss = pairwise_loss(scores, item.truth, item.menu.mask)
                value = loss.item()
                if not math.isfinite(value):
                    raise TrainingDivergedError(epoch, batch_index, value)
                epoch_loss += value
                for name, grad in backward(loss, nodes).items():
                    accum[name] += grad
            for name in accum:
                accum[name] *= inv
            accum["word_embeddings"][0] = 0.0  # PAD row never trains
            new_arrays, state = adam_step(
                params.as_dict(), accum, state, lr=config.learning_rate
            )
            params = RankerParams.from_dict(new_arrays)

        stats = EpochStats(epoch=epoch, train_loss=epoch_loss / len(prepared))
        if val_samples:
            snapshot = RankerModel(config=ranker_config, params=params, vocab=vocab, key_ids=key_ids)
            report = evaluate(snapshot, val_samples, split_name="val")
            stats = EpochStats(
                epoch=epoch,
                train_loss=stats.train_loss,
                val_ndcg=report.ndcg,
                val_cel=report.cel,
                val_acc=report.acc,
            )
        history.append(stats)

    model = RankerModel(config=ranker_config, params=params, vocab=vocab, key_ids=key_ids)
    return model, history


def evaluate(scorer, samples: Sequence[MenuSample], split_name: str = "test") -> MetricsReport:
    """Mean NDCG, CEL, and pairwise accuracy of a scorer over a split.

    ``scorer`` only needs a ``score_menu(dish_names, key) -> scores``
    method, so oracle stubs evaluate the same way trained models do.
    """
    if not samples:
        raise ValueError(f"split {split_name!r} is empty")
    ndcg_total = cel_total = acc_total = 0.0
    for sample in samples:
        scores = np.asarray(scorer.score_menu(sample.dish_names, sample.key), dtype=np.float64)
        truth = np.asarray(sample.truth, dtype=np.int64)
        predicted = rank(scores, np.ones(scores.size, dtype=bool))
        ndcg_total += ndcg(predicted, truth)
        acc_total += pairwise_accuracy(predicted, truth)
        cel_total += pairwise_cross_entropy(scores, truth)
    n = len(samples)
    return MetricsReport(
        ndcg=ndcg_total / n, cel=cel_total / n, acc=acc_total / n, split_name=split_name, n_menus=n
    )


def write_history_csv(path: str | Path, history: Sequence[EpochStats]) -> None:
    """Persist per-epoch stats as epoch,train_loss,val_ndcg,val_cel,val_acc."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_ndcg", "val_cel", "val_acc"])
        for item in history:
            writer.writerow(
                [
                    item.epoch,
                    f"{item.train_loss:.10g}",
                    "" if item.val_ndcg is None else f"{item.val_ndcg:.10g}",
                    "" if item.val_cel is None else f"{item.val_cel:.10g}",
                    "" if item.val_acc is None else f"{item.val_acc:.10g}",
                ]
            )
