"""Seed handling.

All randomness comes from numpy's ``Generator`` with the PCG64 bit generator.
Child seeds are derived with ``SeedSequence`` hashing of ``(seed, index)`` so
that streams for different runs and components never collide.
"""

from __future__ import annotations

import numpy as np

SEED_MAX = 2**64 - 1


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(seed: int, index: int) -> int:
    """Mix ``seed`` with ``index`` into an unsigned 64-bit child seed."""
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (SEED_MAX + 1))
    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(
        1, dtype=np.uint64
    )
    return int(state[0])
