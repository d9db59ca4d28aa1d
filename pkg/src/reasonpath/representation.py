"""Inference matrix (LIM) and inference graph (LIG) builders."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import trace_model
from .embedding import EmbeddingError, Scheme, Vocabulary, embed_answer, embed_step, feature_width
from .trace_model import BugTrace, FunctionCall, ReasoningRun


@dataclass(frozen=True)
class InferenceMatrix:
    """``data[r, t]`` is run ``r``'s step-``t`` vector; shape (R, N, d)."""

    data: np.ndarray
    bug_id: str
    label: bool

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class InferenceGraph:
    keys: tuple[str, ...]
    features: np.ndarray  # (n_nodes, d), row i belongs to keys[i]
    edges: tuple[tuple[int, int, int], ...]  # (src, dst, weight)
    bug_id: str
    label: bool

    @property
    def n_nodes(self) -> int:
        return len(self.keys)

    def edge_list(self) -> str:
        return "".join(f"{self.keys[s]} -> {self.keys[d]} [{w}]\n" for s, d, w in self.edges)


def _answer_included(scheme: Scheme, run: ReasoningRun) -> bool:
    return scheme.has_answer_step and len(run.answer) > 0


def build_lim(bug: BugTrace, scheme, vocab: Vocabulary, N: int, label: bool | None = None) -> InferenceMatrix:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.S:
        raise EmbeddingError("shape-only scheme S applies to graphs only")
    d = feature_width(scheme, vocab.width)
    index = vocab.index(bug.bug_id)
    data = np.zeros((len(bug.runs), N, d))
    for r, run in enumerate(bug.runs):
        if len(run.steps) > N:
            raise trace_model.TraceError(f"run {r} longer than N={N}", bug.bug_id, "runs")
        for t, call in enumerate(run.steps):
            data[r, t] = embed_step(scheme, vocab, bug.bug_id, call, for_matrix=True, index=index)
        if _answer_included(scheme, run):
            # A full-length run has no free row left; its last call yields to the answer.
            row = min(len(run.steps), N - 1)
            data[r, row] = embed_answer(scheme, vocab, bug.bug_id, run.answer, index=index)
    if label is None:
        label = trace_model.label(bug)
    return InferenceMatrix(data, bug.bug_id, label)


def call_key(call: FunctionCall) -> str:
    arg = call.argument.strip() if call.argument is not None else None
    return json.dumps(["call", call.function_type, arg, call.resolved])


def answer_key(answer) -> str:
    return json.dumps(["answer", sorted(a.strip() for a in answer)])


def build_lig(bug: BugTrace, scheme, vocab: Vocabulary, label: bool | None = None) -> InferenceGraph:
    """Merge identical steps across runs into nodes; count consecutive pairs as edge weights.

    Nodes are ordered by content key so the result does not depend on run order.
    """
    scheme = Scheme.parse(scheme)
    index = vocab.index(bug.bug_id)
    feats: dict[str, np.ndarray] = {}
    weights: dict[tuple[str, str], int] = {}
    for run in bug.runs:
        path = []
        for call in run.steps:
            key = call_key(call)
            if key not in feats:
                feats[key] = embed_step(scheme, vocab, bug.bug_id, call, index=index)
            path.append(key)
        if _answer_included(scheme, run):
            key = answer_key(run.answer)
            if key not in feats:
                feats[key] = embed_answer(scheme, vocab, bug.bug_id, run.answer, index=index)
            path.append(key)
        for src, dst in zip(path, path[1:]):
            weights[(src, dst)] = weights.get((src, dst), 0) + 1

    keys = tuple(sorted(feats))
    pos = {k: i for i, k in enumerate(keys)}
    d = feature_width(scheme, vocab.width)
    features = np.array([feats[k] for k in keys]).reshape(len(keys), d)
    edges = tuple(sorted((pos[s], pos[t], w) for (s, t), w in weights.items()))
    if label is None:
        label = trace_model.label(bug)
    return InferenceGraph(keys, features, edges, bug.bug_id, label)


def lstm_sequence(matrix: InferenceMatrix) -> np.ndarray:
    """Interleave runs step by step: element ``t * R + r`` is run ``r``'s step ``t``."""
    R, N, d = matrix.data.shape
    return matrix.data.transpose(1, 0, 2).reshape(R * N, d)
