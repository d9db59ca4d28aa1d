"""Per-bug symbol vocabularies and step/answer feature vectors.

Schemes:
    S    shape only, ones(5) for every node (graphs only)
    F    one-hot function type, width 5
    FA   function type ++ one-hot argument over the bug's symbols, width 5 + W
    FAA  FA plus a final answer step (multi-hot over the bug's symbols)

``W`` is one more than the largest per-bug vocabulary in the dataset. The
last argument slot (``W - 1``) marks arguments that did not resolve.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .trace_model import N_FUNCTION_TYPES, BugTrace, FunctionCall


class Scheme(str, enum.Enum):
    S = "s"
    F = "f"
    FA = "fa"
    FAA = "faa"

    @classmethod
    def parse(cls, value: "Scheme | str") -> "Scheme":
        if isinstance(value, Scheme):
            return value
        key = str(value).lower().replace("+", "")
        for s in cls:
            if s.value == key:
                return s
        raise ValueError(f"unknown scheme {value!r}; expected one of s, f, fa, faa")

    @property
    def uses_arguments(self) -> bool:
        return self in (Scheme.FA, Scheme.FAA)

    @property
    def has_answer_step(self) -> bool:
        return self in (Scheme.S, Scheme.FAA)


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    per_bug: dict[str, tuple[str, ...]]
    width: int

    def index(self, bug_id: str) -> dict[str, int]:
        return {sym: i for i, sym in enumerate(self.per_bug[bug_id])}

    def to_json(self) -> str:
        return json.dumps({k: list(v) for k, v in self.per_bug.items()}, indent=1)


def bug_symbols(bug: BugTrace) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for run in bug.runs:
        for call in run.steps:
            if call.argument is not None and call.resolved:
                seen.setdefault(call.argument.strip(), None)
        for sym in run.answer:
            seen.setdefault(sym.strip(), None)
    return tuple(seen)


def build_vocabulary(bugs, width: int | None = None) -> Vocabulary:
    """Collect each bug's resolved argument and answer symbols in first-seen order.

    ``width`` pins ``W`` (e.g. to a trained checkpoint's input width); symbols
    whose index would not fit then fall into the reserved last slot.
    """
    bugs = list(bugs)
    if not bugs:
        raise EmbeddingError("cannot build a vocabulary from an empty dataset")
    per_bug = {b.bug_id: bug_symbols(b) for b in bugs}
    natural = max(len(v) for v in per_bug.values()) + 1
    if width is None:
        width = natural
    if width < 1:
        raise EmbeddingError("vocabulary width must be >= 1")
    return Vocabulary(per_bug, width)


def feature_width(scheme: Scheme | str, W: int) -> int:
    scheme = Scheme.parse(scheme)
    return N_FUNCTION_TYPES + (W if scheme.uses_arguments else 0)


def _arg_slot(vocab: Vocabulary, index: dict[str, int], symbol: str) -> int:
    i = index.get(symbol.strip())
    if i is None or i >= vocab.width - 1:
        return vocab.width - 1
    return i


def embed_step(scheme, vocab: Vocabulary, bug_id: str, call: FunctionCall,
               *, for_matrix: bool = False, index: dict[str, int] | None = None) -> np.ndarray:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.S:
        if for_matrix:
            raise EmbeddingError("shape-only scheme S applies to graphs only")
        return np.ones(N_FUNCTION_TYPES)
    vec = np.zeros(feature_width(scheme, vocab.width))
    vec[call.function_type] = 1.0
    if scheme.uses_arguments and call.argument is not None:
        if not call.resolved:
            slot = vocab.width - 1
        else:
            slot = _arg_slot(vocab, index if index is not None else vocab.index(bug_id), call.argument)
        vec[N_FUNCTION_TYPES + slot] = 1.0
    return vec


def embed_answer(scheme, vocab: Vocabulary, bug_id: str, answer,
                 *, index: dict[str, int] | None = None) -> np.ndarray:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.S:
        return np.ones(N_FUNCTION_TYPES)
    if scheme is not Scheme.FAA:
        raise EmbeddingError(f"scheme {scheme.value} has no answer step")
    index = index if index is not None else vocab.index(bug_id)
    vec = np.zeros(feature_width(scheme, vocab.width))
    for sym in answer:
        vec[N_FUNCTION_TYPES + _arg_slot(vocab, index, sym)] = 1.0
    return vec
