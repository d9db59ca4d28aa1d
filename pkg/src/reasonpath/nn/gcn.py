"""Graph convolution stack with mean pooling and a scalar output head.

Messages follow edge direction: a node aggregates from its predecessors,
weighted by edge multiplicity, plus a unit self-loop, under symmetric degree
normalization ``D^-1/2 (A + I) D^-1/2`` with ``D`` the weighted in-degree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .functional import dropout_mask, glorot


class EmptyGraphError(ValueError):
    """A graph with no nodes cannot be mean-pooled."""


def normalized_adjacency(n: int, edges) -> np.ndarray:
    A = np.eye(n)
    for src, dst, w in edges:
        A[dst, src] += w
    deg = A.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(deg)
    return inv_sqrt[:, None] * A * inv_sqrt[None, :]


def canonical(graph):
    """Return (features, edges) with nodes in content-key order."""
    keys = graph.keys
    order = sorted(range(len(keys)), key=keys.__getitem__)
    if order == list(range(len(keys))):
        return graph.features, graph.edges
    new = {old: i for i, old in enumerate(order)}
    edges = sorted((new[s], new[d], w) for s, d, w in graph.edges)
    return graph.features[order], edges


@dataclass
class GraphBatch:
    A: sp.csr_matrix  # block-diagonal normalized adjacency
    X: np.ndarray
    pool: sp.csr_matrix  # (graphs, nodes) mean-pooling operator

    @property
    def size(self) -> int:
        return self.pool.shape[0]


@dataclass(frozen=True)
class PreparedGraph:
    A: np.ndarray
    X: np.ndarray


def prepare(graph) -> PreparedGraph:
    if graph.n_nodes == 0:
        raise EmptyGraphError(f"bug {graph.bug_id!r}: graph has no nodes")
    X, edges = canonical(graph)
    return PreparedGraph(normalized_adjacency(len(X), edges), np.asarray(X, dtype=np.float64))


class GCNClassifier:
    kind = "gcn"

    def __init__(self, input_dim: int, hidden_dim: int, layers: int = 3, dropout: float = 0.0,
                 rng: np.random.Generator | None = None, init: bool = True):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.layers = layers
        self.dropout = dropout
        rng = rng if rng is not None else np.random.default_rng(0)
        self.params: dict[str, np.ndarray] = {}
        for l in range(layers):
            d_in = input_dim if l == 0 else hidden_dim
            self.params[f"gcn{l}.W"] = glorot(rng, d_in, hidden_dim) if init else np.zeros((d_in, hidden_dim))
            self.params[f"gcn{l}.b"] = np.zeros(hidden_dim)
        self.params["fc.w"] = glorot(rng, hidden_dim, 1, shape=(hidden_dim,)) if init else np.zeros(hidden_dim)
        self.params["fc.b"] = np.zeros(1)
        self._cache = None

    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        return {k: v.shape for k, v in self.params.items()}

    @staticmethod
    def collate(graphs) -> GraphBatch:
        prepared = [g if isinstance(g, PreparedGraph) else prepare(g) for g in graphs]
        sizes = [len(p.X) for p in prepared]
        A = sp.block_diag([p.A for p in prepared], format="csr")
        X = np.vstack([p.X for p in prepared])
        rows = np.repeat(np.arange(len(sizes)), sizes)
        vals = np.repeat([1.0 / n for n in sizes], sizes)
        pool = sp.csr_matrix((vals, (rows, np.arange(len(rows)))), shape=(len(sizes), len(rows)))
        return GraphBatch(A, X, pool)

    def forward(self, batch: GraphBatch, train: bool = False, rng: np.random.Generator | None = None) -> np.ndarray:
        if batch.X.shape[1] != self.input_dim:
            raise ValueError(f"expected node features of width {self.input_dim}, got {batch.X.shape[1]}")
        H = batch.X
        cache = []
        for l in range(self.layers):
            M = batch.A @ H
            Z = M @ self.params[f"gcn{l}.W"] + self.params[f"gcn{l}.b"]
            if l < self.layers - 1:
                mask = dropout_mask(Z.shape, self.dropout, rng) if train else None
                H = np.maximum(Z, 0.0)
                if mask is not None:
                    H = H * mask
            else:
                mask = None
                H = Z
            cache.append((M, Z, mask))
        pooled = batch.pool @ H
        logits = pooled @ self.params["fc.w"] + self.params["fc.b"][0]
        self._cache = (batch, cache, pooled)
        return logits

    def backward(self, dlogits: np.ndarray) -> dict[str, np.ndarray]:
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        batch, cache, pooled = self._cache
        dlogits = np.asarray(dlogits, dtype=np.float64)
        grads = {"fc.w": pooled.T @ dlogits, "fc.b": np.array([dlogits.sum()])}
        dH = batch.pool.T @ np.outer(dlogits, self.params["fc.w"])
        for l in reversed(range(self.layers)):
            M, Z, mask = cache[l]
            if l < self.layers - 1:
                dZ = dH * mask if mask is not None else dH
                dZ = dZ * (Z > 0)
            else:
                dZ = dH
            W = self.params[f"gcn{l}.W"]
            grads[f"gcn{l}.W"] = M.T @ dZ
            grads[f"gcn{l}.b"] = dZ.sum(axis=0)
            if l > 0:
                dH = batch.A.T @ (dZ @ W.T)
        return grads


def gcn_forward(graph, model: GCNClassifier, train: bool = False, rng=None) -> float:
    return float(model.forward(model.collate([graph]), train, rng)[0])
