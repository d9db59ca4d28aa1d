"""Reasoning-trace data model, trace-file I/O, voting and the confidence baseline.

A trace file holds, per bug, ``R`` independent agent runs. Each run is an
ordered list of tool calls followed by a (possibly empty) set of answer
methods. Votes are spread uniformly over each run's answer set and averaged
over runs; the highest vote share is the confidence of the final answer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

N_FUNCTION_TYPES = 5
DATASETS = ("bugsinpy", "defects4j")


class TraceError(ValueError):
    """A trace record violates the schema or a data-model invariant."""

    def __init__(self, message: str, bug_id: str | None = None, field: str | None = None):
        self.bug_id = bug_id
        self.field = field
        where = []
        if bug_id is not None:
            where.append(f"bug {bug_id!r}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class FunctionCall:
    function_type: int
    argument: str | None = None
    resolved: bool = True

    def __post_init__(self):
        if not (0 <= self.function_type < N_FUNCTION_TYPES):
            raise TraceError(f"function type {self.function_type} outside [0, {N_FUNCTION_TYPES})")
        if self.argument is None and not self.resolved:
            raise TraceError("argumentless call cannot be unresolved")


@dataclass(frozen=True)
class ReasoningRun:
    steps: tuple[FunctionCall, ...] = ()
    # Kept in file order; ``answer_set`` is the set view used for voting.
    answer: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.answer)) != len(self.answer):
            raise TraceError("duplicate answer entries")

    @property
    def answer_set(self) -> frozenset[str]:
        return frozenset(self.answer)


@dataclass(frozen=True)
class BugTrace:
    bug_id: str
    dataset: str
    ground_truth: str
    runs: tuple[ReasoningRun, ...]

    @property
    def R(self) -> int:
        return len(self.runs)


@dataclass(frozen=True)
class TraceHeader:
    R: int
    N: int
    functions: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class TraceDataset:
    header: TraceHeader
    bugs: tuple[BugTrace, ...]

    def __len__(self) -> int:
        return len(self.bugs)

    def __iter__(self):
        return iter(self.bugs)


# -- ingestion ---------------------------------------------------------------


def _require(cond: bool, message: str, bug_id=None, field=None):
    if not cond:
        raise TraceError(message, bug_id=bug_id, field=field)


def _parse_call(raw, bug_id: str, where: str) -> FunctionCall:
    _require(isinstance(raw, dict), "step must be an object", bug_id, where)
    missing = {"function", "argument", "resolved"} - raw.keys()
    _require(not missing, f"missing keys {sorted(missing)}", bug_id, where)
    ftype, arg, resolved = raw["function"], raw["argument"], raw["resolved"]
    _require(isinstance(ftype, int) and not isinstance(ftype, bool), "must be an integer", bug_id, f"{where}.function")
    _require(0 <= ftype < N_FUNCTION_TYPES, f"function index {ftype} not in [0, {N_FUNCTION_TYPES})", bug_id, f"{where}.function")
    _require(arg is None or isinstance(arg, str), "must be a string or null", bug_id, f"{where}.argument")
    _require(isinstance(resolved, bool), "must be a boolean", bug_id, f"{where}.resolved")
    _require(arg is not None or resolved, "argumentless call cannot be unresolved", bug_id, f"{where}.resolved")
    return FunctionCall(ftype, arg, resolved)


def _parse_bug(raw, header: TraceHeader, position: int) -> BugTrace:
    _require(isinstance(raw, dict), f"bug record #{position} must be an object", field="bugs")
    bug_id = raw.get("bug_id")
    _require(isinstance(bug_id, str) and bug_id != "", f"bug record #{position} lacks a string bug_id", field="bug_id")
    _require(raw.get("dataset") in DATASETS, f"dataset must be one of {DATASETS}", bug_id, "dataset")
    _require(isinstance(raw.get("ground_truth"), str), "must be a string", bug_id, "ground_truth")
    runs_raw = raw.get("runs")
    _require(isinstance(runs_raw, list), "must be a list", bug_id, "runs")
    _require(len(runs_raw) == header.R, f"has {len(runs_raw)} runs, header says R={header.R}", bug_id, "runs")

    runs = []
    for r, run in enumerate(runs_raw):
        where = f"runs[{r}]"
        _require(isinstance(run, dict), "run must be an object", bug_id, where)
        steps_raw, answer_raw = run.get("steps"), run.get("answer")
        _require(isinstance(steps_raw, list), "must be a list", bug_id, f"{where}.steps")
        _require(len(steps_raw) <= header.N, f"run {r} has {len(steps_raw)} steps, exceeds N={header.N}", bug_id, f"{where}.steps")
        _require(isinstance(answer_raw, list) and all(isinstance(a, str) for a in answer_raw),
                 "must be a list of strings", bug_id, f"{where}.answer")
        _require(len(set(answer_raw)) == len(answer_raw), "duplicate answer entries", bug_id, f"{where}.answer")
        steps = tuple(_parse_call(s, bug_id, f"{where}.steps[{i}]") for i, s in enumerate(steps_raw))
        runs.append(ReasoningRun(steps, tuple(answer_raw)))
    return BugTrace(bug_id, raw["dataset"], raw["ground_truth"], tuple(runs))


def parse(doc) -> TraceDataset:
    """Validate a decoded trace document and build the dataset."""
    _require(isinstance(doc, dict), "top level must be an object")
    for key in ("R", "N"):
        val = doc.get(key)
        _require(isinstance(val, int) and not isinstance(val, bool) and val >= 1, "must be a positive integer", field=key)
    functions = doc.get("functions", {})
    _require(isinstance(functions, dict), "must be an object", field="functions")
    for name, idx in functions.items():
        _require(isinstance(idx, int) and 0 <= idx < N_FUNCTION_TYPES, f"index for {name!r} not in [0, {N_FUNCTION_TYPES})", field="functions")
    header = TraceHeader(doc["R"], doc["N"], dict(functions))
    bugs_raw = doc.get("bugs")
    _require(isinstance(bugs_raw, list), "must be a list", field="bugs")

    bugs, seen = [], set()
    for i, raw in enumerate(bugs_raw):
        bug = _parse_bug(raw, header, i)
        _require(bug.bug_id not in seen, "duplicate bug_id", bug.bug_id, "bug_id")
        seen.add(bug.bug_id)
        bugs.append(bug)
    return TraceDataset(header, tuple(bugs))


def ingest(path: str | Path) -> TraceDataset:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TraceError(f"not valid JSON: {exc}") from exc
    return parse(doc)


def to_document(dataset: TraceDataset) -> dict:
    h = dataset.header
    return {
        "R": h.R,
        "N": h.N,
        "functions": dict(h.functions),
        "bugs": [
            {
                "bug_id": b.bug_id,
                "dataset": b.dataset,
                "ground_truth": b.ground_truth,
                "runs": [
                    {
                        "steps": [
                            {"function": s.function_type, "argument": s.argument, "resolved": s.resolved}
                            for s in run.steps
                        ],
                        "answer": list(run.answer),
                    }
                    for run in b.runs
                ],
            }
            for b in dataset.bugs
        ],
    }


def serialize(dataset: TraceDataset) -> str:
    return json.dumps(to_document(dataset), indent=1, ensure_ascii=False) + "\n"


def write(dataset: TraceDataset, path: str | Path) -> None:
    Path(path).write_text(serialize(dataset), encoding="utf-8")


# -- voting ------------------------------------------------------------------


def vote_scores(bug: BugTrace) -> dict[str, Fraction]:
    """Vote share of every answered method, exact.

    Each run gives ``1/|answer|`` to each of its answers; runs with no answer
    give nothing. Shares are averaged over all ``R`` runs.
    """
    R = len(bug.runs)
    tally: dict[str, Fraction] = {}
    for run in bug.runs:
        answers = run.answer_set
        if not answers:
            continue
        share = Fraction(1, R * len(answers))
        for m in sorted(answers):
            tally[m] = tally.get(m, Fraction(0)) + share
    return tally


def confidence(tally: dict[str, Fraction]) -> Fraction:
    return max(tally.values(), default=Fraction(0))


def label(bug: BugTrace) -> bool:
    """True iff the ground truth holds the strict, unique top vote share."""
    tally = vote_scores(bug)
    top = tally.get(bug.ground_truth)
    if top is None:
        return False
    return all(score < top for m, score in tally.items() if m != bug.ground_truth)


def classify_by_confidence(tally: dict[str, Fraction], threshold: float = 0.5) -> bool:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    return confidence(tally) >= Fraction(threshold)


def truncate(bug: BugTrace, t: int, N: int | None = None) -> BugTrace:
    """Keep the first ``t`` steps of every run and drop all answers.

    Answers are never read, so this is safe to apply before inference ends.
    """
    if t < 0 or (N is not None and t > N):
        raise ValueError(f"prefix length {t} outside [0, {N}]")
    runs = tuple(ReasoningRun(run.steps[:t], ()) for run in bug.runs)
    return BugTrace(bug.bug_id, bug.dataset, bug.ground_truth, runs)


def labels(bugs: Iterable[BugTrace]) -> list[bool]:
    return [label(b) for b in bugs]
