"""Ranking quality metrics and the pairwise comparison loss.

NDCG uses exponential gains with relevance M - true_rank (the best dish
gets M-1) and the usual log2 position discount.  Accuracy is pairwise
concordance: the fraction of dish pairs both orderings agree on.  The
training loss is the logistic pairwise form, -log sigmoid(s_i - s_j)
averaged over every pair the ground truth ranks i above j; its value on
a frozen score vector doubles as the reported cross-entropy (CEL).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import autodiff as ad
from .autodiff import ContractError, Tensor2


def _check_permutations(predicted, truth) -> tuple[np.ndarray, np.ndarray]:
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ContractError(f"permutation shapes differ: {predicted.shape} vs {truth.shape}")
    if predicted.size == 0:
        raise ContractError("permutations must rank at least one dish")
    members = set(predicted.tolist())
    if members != set(truth.tolist()) or len(members) != predicted.size:
        raise ContractError("predicted and truth must be bijections over the same dish indices")
    return predicted, truth


def ndcg(predicted: Sequence[int], truth: Sequence[int]) -> float:
    """Normalised discounted cumulative gain of ``predicted`` against ``truth``."""
    predicted, truth = _check_permutations(predicted, truth)
    m = predicted.size
    if m == 1:
        return 1.0
    relevance = {int(dish): m - rank for rank, dish in enumerate(truth, start=1)}
    dcg = sum((2.0 ** relevance[int(d)] - 1.0) / math.log2(p + 1) for p, d in enumerate(predicted, start=1))
    ideal = sum((2.0 ** relevance[int(d)] - 1.0) / math.log2(p + 1) for p, d in enumerate(truth, start=1))
    return dcg / ideal


def pairwise_accuracy(predicted: Sequence[int], truth: Sequence[int]) -> float:
    """Fraction of unordered dish pairs ordered the same way by both rankings."""
    predicted, truth = _check_permutations(predicted, truth)
    m = predicted.size
    if m == 1:
        return 1.0
    pos_pred = np.empty(int(predicted.max()) + 1, dtype=np.int64)
    pos_true = np.empty_like(pos_pred)
    pos_pred[predicted] = np.arange(m)
    pos_true[truth] = np.arange(m)
    dishes = np.sort(predicted)
    dp = pos_pred[dishes][:, None] - pos_pred[dishes][None, :]
    dt = pos_true[dishes][:, None] - pos_true[dishes][None, :]
    upper = np.triu_indices(m, k=1)
    agreements = np.sign(dp[upper]) == np.sign(dt[upper])
    return float(agreements.mean())


def pairwise_loss(scores: Tensor2, truth: Sequence[int], mask=None) -> Tensor2:
    """Mean -log sigmoid(s_i - s_j) over ground-truth-ordered pairs.

    ``scores`` is an (M, 1) graph node; ``truth`` ranks the valid dish
    indices best-first.  A single-dish menu has no pairs and yields a
    constant zero loss.
    """
    truth = np.asarray(truth, dtype=np.int64)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if sorted(truth.tolist()) != list(np.flatnonzero(mask)):
            raise ContractError("truth must be a permutation of the valid dish indices")
    if scores.cols != 1:
        raise ContractError(f"scores must be a column, got {scores.rows}x{scores.cols}")
    if truth.size < 2:
        return ad.constant([[0.0]])
    selector = np.zeros((truth.size * (truth.size - 1) // 2, scores.rows))
    r = 0
    for a in range(truth.size):
        for b in range(a + 1, truth.size):
            selector[r, truth[a]] = 1.0
            selector[r, truth[b]] = -1.0
            r += 1
    margins = ad.matmul(ad.constant(selector), scores)
    return ad.mean_all(ad.softplus(ad.scale(margins, -1.0)))


def pairwise_cross_entropy(scores: Sequence[float], truth: Sequence[int], mask=None) -> float:
    """CEL of a frozen score vector: the pairwise loss off the tape."""
    column = np.asarray(scores, dtype=np.float64).reshape(-1, 1)
    return pairwise_loss(ad.constant(column), truth, mask).item()
