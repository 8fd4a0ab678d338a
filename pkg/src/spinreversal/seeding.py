"""Deterministic seed derivation.

Every random draw in the package comes from a generator seeded with
``derive_seed(root, *keys)``, so any sub-computation can be replayed from its
key path without running the computations that preceded it.
"""

from __future__ import annotations

import numpy as np

# key-path tags
READS = 1
NATIVE_MASK = 2
NATIVE_READS = 3
GA_INIT = 4
GA_VARIATION = 5
GA_EVAL = 6
GA_ELITE = 7
EXPERIMENT = 8
CHIP_BIAS = 9
CHIP_COUPLER = 10


def derive_seed(*keys: int) -> int:
    """A 32-bit seed determined by the sequence of non-negative integer ``keys``."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def derive_seeds(root: int, count: int, *keys: int) -> np.ndarray:
    """``count`` 32-bit seeds for ``(root, *keys, i)``, ``i = 0..count-1``."""
    return np.random.SeedSequence([int(root), *map(int, keys)]).generate_state(count)
