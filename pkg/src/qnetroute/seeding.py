"""Deterministic seed derivation and generator construction.

Every random draw in this package comes from numpy's PCG64 bit generator,
created by :func:`make_rng` from an explicit 64-bit seed. Derived seeds are
produced by :func:`split_seed`, which feeds the parent seed and an integer
key path through ``numpy.random.SeedSequence(seed, spawn_key=key)``. Both
mechanisms are fully specified by numpy, so any (seed, key path) pair
yields identical streams on every platform.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator seeded directly with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(seed))


def split_seed(seed: int, *key: int) -> int:
    """Derive a child 64-bit seed from a parent seed and an integer key path."""
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return int(sequence.generate_state(1, np.uint64)[0])
