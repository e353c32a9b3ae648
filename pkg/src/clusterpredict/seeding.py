"""Seed derivation.

Every stochastic component draws from its own ``numpy.random.Generator``
seeded by :func:`derive`, a pure 64-bit mixing function of a master seed and
a key. Keeping the derivation fixed is what makes a one-cluster hybrid model
prediction-identical to the standalone classifier seeded with
``derive(seed, 0)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 finalizer (Steele et al.), on Python ints."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def _key_to_int(key: int | str) -> int:
    if isinstance(key, str):
        # FNV-1a over UTF-8 bytes
        h = 0xCBF29CE484222325
        for byte in key.encode("utf-8"):
            h = ((h ^ byte) * 0x100000001B3) & MASK64
        return h
    if key < 0:
        raise ValueError(f"integer keys must be non-negative, got {key}")
    return key & MASK64


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def derive(seed: int, key: int | str) -> int:
    """Derive an independent child seed from ``seed`` and ``key``."""
    return splitmix64(splitmix64(check_seed(seed)) ^ splitmix64(_key_to_int(key)))


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(check_seed(seed))
