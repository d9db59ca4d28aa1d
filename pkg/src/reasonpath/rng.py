"""Deterministic RNG streams keyed by (seed, fold, purpose)."""

from __future__ import annotations

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys) -> int:
    """Fold integer or string keys into ``seed`` through chained splitmix64 mixing."""
    state = splitmix64(seed & MASK64)
    for key in keys:
        if isinstance(key, str):
            key = zlib.crc32(key.encode("utf-8"))
        state = splitmix64(state ^ (int(key) & MASK64))
    return state


def stream(seed: int, *keys) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *keys)))
