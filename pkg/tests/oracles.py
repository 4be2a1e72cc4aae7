"""Brute-force reference implementations the library is checked against.

Everything here is deliberately naive: explicit loops, direct formulas,
no shared code with the package.  Tests compare dishrank's vectorised or
tape-based implementations to these.
"""

import math

import numpy as np


def naive_matmul(a, b):
    """Triple-loop matrix product."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0.0
            for k in range(a.shape[1]):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


def central_differences(loss_fn, arrays, step=1e-5):
    """Central finite-difference gradients of a scalar loss.

    ``arrays`` maps names to np arrays that ``loss_fn()`` reads in place;
    each entry is wiggled one element at a time.
    """
    grads = {}
    for name, arr in arrays.items():
        grad = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            original = arr[idx]
            arr[idx] = original + step
            up = loss_fn()
            arr[idx] = original - step
            down = loss_fn()
            arr[idx] = original
            grad[idx] = (up - down) / (2.0 * step)
        grads[name] = grad
    return grads


def max_relative_error(analytic, numeric, floor=1e-6):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float((np.abs(analytic - numeric) / denom).max())


def naive_rank(scores, mask):
    """Stable descending sort of the valid indices."""
    pairs = [(i, s) for i, s in enumerate(scores) if mask[i]]
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return [i for i, _ in pairs]


def naive_ndcg(predicted, truth):
    m = len(truth)
    if m == 1:
        return 1.0
    relevance = {}
    for position, dish in enumerate(truth):
        relevance[dish] = m - (position + 1)
    dcg = 0.0
    idcg = 0.0
    for position, dish in enumerate(predicted):
        dcg += (2.0 ** relevance[dish] - 1.0) / math.log2(position + 2)
    for position, dish in enumerate(truth):
        idcg += (2.0 ** relevance[dish] - 1.0) / math.log2(position + 2)
    return dcg / idcg


def naive_pairwise_accuracy(predicted, truth):
    m = len(truth)
    if m == 1:
        return 1.0
    pred_pos = {dish: p for p, dish in enumerate(predicted)}
    true_pos = {dish: p for p, dish in enumerate(truth)}
    dishes = sorted(true_pos)
    agree = 0
    total = 0
    for x in range(m):
        for y in range(x + 1, m):
            a, b = dishes[x], dishes[y]
            total += 1
            if (pred_pos[a] < pred_pos[b]) == (true_pos[a] < true_pos[b]):
                agree += 1
    return agree / total


def naive_pairwise_loss(scores, truth):
    """Mean -log sigmoid(s_i - s_j) over truth-ordered pairs, double loop."""
    n = len(truth)
    if n < 2:
        return 0.0
    total = 0.0
    count = 0
    for a in range(n):
        for b in range(a + 1, n):
            margin = scores[truth[a]] - scores[truth[b]]
            total += math.log(1.0 + math.exp(-margin))
            count += 1
    return total / count


def naive_ground_truth(dish_values, names, ascending=True):
    """Sort indices by (value, standardised name, index)."""
    sign = 1.0 if ascending else -1.0
    order = sorted(range(len(names)), key=lambda i: (sign * dish_values[i], names[i], i))
    return order
