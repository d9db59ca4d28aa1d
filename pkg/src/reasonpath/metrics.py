"""Thresholded classification metrics and ROC analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.metrics import roc_curve


class UndefinedAUCError(ValueError):
    """ROC-AUC needs at least one positive and one negative label."""


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / (self.tp + self.fp + self.tn + self.fn)

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0


def confusion(scores, labels, threshold: float = 0.5) -> Confusion:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise ValueError(f"{len(scores)} scores but {len(labels)} labels")
    if scores.size == 0:
        raise ValueError("cannot evaluate an empty set")
    pred = scores >= threshold
    return Confusion(
        tp=int(np.sum(pred & labels)),
        fp=int(np.sum(pred & ~labels)),
        tn=int(np.sum(~pred & ~labels)),
        fn=int(np.sum(~pred & labels)),
    )


def evaluate(scores, labels, threshold: float = 0.5) -> dict[str, float]:
    c = confusion(scores, labels, threshold)
    return {"accuracy": c.accuracy, "precision": c.precision, "recall": c.recall}


def roc_auc(scores, labels) -> float:
    """Probability a random positive outscores a random negative, ties counting half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    pos, neg = np.sort(scores[labels]), np.sort(scores[~labels])
    if pos.size == 0 or neg.size == 0:
        raise UndefinedAUCError("ROC-AUC is undefined for single-class labels")
    below = np.searchsorted(neg, pos, side="left")
    ties = np.searchsorted(neg, pos, side="right") - below
    # Integer numerator (in half-units) keeps the result exact up to one division.
    return float((2 * int(below.sum()) + int(ties.sum())) / (2 * pos.size * neg.size))


def roc_points(scores, labels) -> list[tuple[float, float, float]]:
    """(fpr, tpr, threshold) at every distinct score, starting from (0, 0, inf)."""
    labels = np.asarray(labels, dtype=bool)
    if labels.all() or not labels.any():
        raise UndefinedAUCError("ROC curve is undefined for single-class labels")
    fpr, tpr, thr = roc_curve(labels, np.asarray(scores, dtype=np.float64), drop_intermediate=False)
    return [(float(f), float(t), float(h)) for f, t, h in zip(fpr, tpr, thr)]


def interpolate_roc(points, grid) -> np.ndarray:
    fpr = np.array([p[0] for p in points])
    tpr = np.array([p[1] for p in points])
    return np.interp(grid, fpr, tpr)


def safe_auc(scores, labels) -> float | None:
    try:
        return roc_auc(scores, labels)
    except UndefinedAUCError:
        return None
