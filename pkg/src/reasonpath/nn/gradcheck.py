"""Analytic-vs-central-difference gradient comparison on small random problems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functional import bce_batch
from .gcn import GCNClassifier
from .lstm import LSTMClassifier


@dataclass
class GradCheckReport:
    model: str
    max_rel_error: float
    per_param: dict[str, float]
    n_checked: int

    def passed(self, tol: float = 1e-4) -> bool:
        return self.max_rel_error < tol


class _RandomGraph:
    """Minimal stand-in for an inference graph with random weighted edges."""

    def __init__(self, rng, n_nodes, d):
        self.keys = tuple(f"n{i:03d}" for i in range(n_nodes))
        self.features = rng.normal(size=(n_nodes, d))
        edges = {}
        for _ in range(2 * n_nodes):
            s, t = rng.integers(n_nodes, size=2)
            edges[(int(s), int(t))] = edges.get((int(s), int(t)), 0) + int(rng.integers(1, 4))
        self.edges = tuple(sorted((s, t, w) for (s, t), w in edges.items()))
        self.bug_id = "random"

    @property
    def n_nodes(self):
        return len(self.keys)


def rel_error(a: np.ndarray, b: np.ndarray, floor: float = 1e-8) -> np.ndarray:
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


def check_gradients(model, batch, labels, eps: float = 1e-5) -> tuple[float, dict[str, float], int]:
    def loss_at():
        return bce_batch(model.forward(batch, train=False), labels)[0]

    _, dlogits = bce_batch(model.forward(batch, train=False), labels)
    analytic = model.backward(dlogits)
    per_param, count = {}, 0
    for name, p in model.params.items():
        numeric = np.zeros_like(p)
        flat, nflat = p.reshape(-1), numeric.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = loss_at()
            flat[i] = orig - eps
            down = loss_at()
            flat[i] = orig
            nflat[i] = (up - down) / (2 * eps)
        per_param[name] = float(rel_error(analytic[name], numeric).max()) if p.size else 0.0
        count += p.size
    return max(per_param.values()), per_param, count


def grad_check(kind: str = "lstm", hidden_dim: int = 4, layers: int = 2, seed: int = 0,
               input_dim: int = 3, seq_len: int = 6, n_nodes: int = 5, batch: int = 3) -> GradCheckReport:
    """Dropout is always disabled here so both passes see the same function."""
    if hidden_dim > 8:
        raise ValueError("grad_check is meant for small models (hidden_dim <= 8)")
    rng = np.random.default_rng(seed)
    if kind == "lstm":
        model = LSTMClassifier(input_dim, hidden_dim, layers, dropout=0.0, rng=rng)
        # Random biases exercise paths that zero initialization would hide.
        for name, p in model.params.items():
            p += rng.normal(scale=0.3, size=p.shape)
        data = rng.normal(size=(batch, seq_len, input_dim))
    elif kind == "gcn":
        model = GCNClassifier(input_dim, hidden_dim, layers, dropout=0.0, rng=rng)
        for name, p in model.params.items():
            p += rng.normal(scale=0.3, size=p.shape)
        data = model.collate([_RandomGraph(rng, n_nodes, input_dim) for _ in range(batch)])
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    labels = rng.integers(0, 2, size=batch).astype(float)
    worst, per_param, n = check_gradients(model, data, labels)
    return GradCheckReport(kind, worst, per_param, n)
