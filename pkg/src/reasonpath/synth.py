"""Synthetic trace generator with a planted self-consistency signal.

Correct-looking bugs converge: late in each run the agent keeps inspecting the
ground-truth method with the narrowing tools, and every run answers it. The
rest wander uniformly over the bug's symbols and answer at random. Labels are
never assumed; whatever the voting rule says is what the bug is.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from . import rng as rngmod
from .trace_model import BugTrace, FunctionCall, ReasoningRun, TraceDataset, TraceHeader, label

NARROWING_TOOLS = (2, 3)
ARGUMENTLESS_TOOL = 0


@dataclass(frozen=True)
class SynthConfig:
    n_bugs: int = 300
    positive_fraction: float = 0.67
    R: int = 10
    N: int = 10
    tools: int = 5
    symbols_per_bug: int = 12
    convergence: float = 0.9
    noise: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.convergence <= 1.0:
            raise ValueError("convergence must be in [0, 1]")
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must be in [0, 1]")
        if not 0.0 <= self.positive_fraction <= 1.0:
            raise ValueError("positive_fraction must be in [0, 1]")
        if self.symbols_per_bug < 2:
            raise ValueError("symbols_per_bug must be >= 2")
        if self.tools != 5:
            raise ValueError("the trace model has exactly 5 function types")
        if self.n_bugs < 1 or self.R < 1 or self.N < 2:
            raise ValueError("n_bugs and R must be >= 1, N >= 2")

    @classmethod
    def load(cls, path) -> "SynthConfig":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return asdict(self)


def _random_call(rng, pool) -> FunctionCall:
    ftype = int(rng.integers(5))
    if ftype == ARGUMENTLESS_TOOL:
        return FunctionCall(ftype)
    return FunctionCall(ftype, pool[int(rng.integers(len(pool)))])


def _bug(cfg: SynthConfig, i: int, positive: bool) -> BugTrace:
    rng = rngmod.stream(cfg.seed, "synth-bug", i)
    pool = [f"pkg{i}.Mod{j // 4}.method{j}" for j in range(cfg.symbols_per_bug)]
    gt = pool[int(rng.integers(len(pool)))]
    decoys = [s for s in pool if s != gt]
    runs = []
    for r in range(cfg.R):
        length = int(rng.integers(cfg.N // 2, cfg.N + 1))
        steps = []
        for t in range(length):
            if positive and t >= length // 2 and rng.random() < cfg.convergence:
                call = FunctionCall(NARROWING_TOOLS[int(rng.integers(2))], gt)
            else:
                call = _random_call(rng, pool)
            if call.argument is not None and rng.random() < cfg.noise:
                call = FunctionCall(call.function_type, f"pkg{i}.Missing.method{int(rng.integers(1000))}", False)
            steps.append(call)
        if positive and rng.random() >= cfg.noise:
            answer = (gt,)
        else:
            # Misses name decoys only, so a converging bug is the only way to a correct vote.
            k = 1 + int(rng.integers(2))
            answer = tuple(sorted(decoys[int(j)] for j in rng.choice(len(decoys), size=k, replace=False)))
        runs.append(ReasoningRun(tuple(steps), answer))
    dataset = "bugsinpy" if rng.random() < 294 / 456 else "defects4j"
    return BugTrace(f"synth-{i:05d}", dataset, gt, tuple(runs))


def planted(cfg: SynthConfig) -> list[bool]:
    """Which bugs are drawn from the converging population (before relabeling).

    Exactly ``round(positive_fraction * n_bugs)`` bugs are planted.
    """
    order = rngmod.stream(cfg.seed, "synth-planted").permutation(cfg.n_bugs)
    flags = [False] * cfg.n_bugs
    for i in order[:round(cfg.positive_fraction * cfg.n_bugs)]:
        flags[int(i)] = True
    return flags


def generate(cfg: SynthConfig) -> TraceDataset:
    header = TraceHeader(cfg.R, cfg.N, {f"tool{k}": k for k in range(cfg.tools)})
    flags = planted(cfg)
    return TraceDataset(header, tuple(_bug(cfg, i, flags[i]) for i in range(cfg.n_bugs)))


def positive_rate(dataset: TraceDataset) -> float:
    return sum(label(b) for b in dataset.bugs) / len(dataset.bugs)
