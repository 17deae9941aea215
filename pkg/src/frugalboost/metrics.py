"""Ranking and classification metrics."""

from __future__ import annotations

import math

import numpy as np

from .errors import DataError

METRICS = ("ndcg5", "accuracy", "neg-loss")


def _dcg(labels, k):
    return sum((2.0 ** float(labels[r]) - 1.0) / math.log2(r + 2) for r in range(min(k, len(labels))))


def ndcg_at_k(scores, labels, k: int = 5) -> float:
    """Mean NDCG@k over queries.

    ``scores`` and ``labels`` are sequences of per-query arrays. Documents are
    ranked by descending score, ties by original position. A query whose ideal
    DCG is zero counts as 1.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if len(scores) == 0:
        raise DataError("ndcg needs at least one query")
    if len(scores) != len(labels):
        raise DataError("scores and labels disagree on the number of queries")
    total = 0.0
    for s, y in zip(scores, labels):
        s = np.asarray(s, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if s.shape != y.shape:
            raise DataError("scores and labels disagree within a query")
        ideal = _dcg(np.sort(y)[::-1], k)
        if ideal == 0.0:
            total += 1.0
            continue
        order = np.lexsort((np.arange(s.size), -s))
        total += _dcg(y[order], k) / ideal
    return total / len(scores)


def ndcg_by_query(scores, labels, groups, k: int = 5) -> float:
    """NDCG@k with flat ``scores``/``labels`` and a list of per-query row indices."""
    scores = np.asarray(scores)
    labels = np.asarray(labels)
    return ndcg_at_k([scores[g] for g in groups], [labels[g] for g in groups], k)


def accuracy(scores, labels) -> float:
    """Fraction of rows whose arg-max column equals the label (ties pick the lowest id)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 2 or scores.shape[0] != labels.shape[0]:
        raise DataError("accuracy needs an n x K score matrix aligned with the labels")
    if labels.size == 0:
        raise DataError("accuracy of an empty set")
    return float(np.mean(np.argmax(scores, axis=1) == labels))
