"""Counter-based random streams.

Every Monte-Carlo block draws from its own Philox stream keyed by
``(seed, purpose, *indices)``, so results never depend on how blocks are
distributed across workers.
"""

from enum import IntEnum

import numpy as np


class Purpose(IntEnum):
    CAPACITY = 1
    CONSTRUCTION = 2
    FRAMES = 3
    INTERLEAVER = 4


def stream(seed: int, purpose: Purpose, *indices: int) -> np.random.Generator:
    key = np.random.SeedSequence([int(seed), int(purpose), *map(int, indices)])
    return np.random.Generator(np.random.Philox(key))


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Draw i.i.d. CN(0, variance) samples (real and imaginary parts N(0, variance/2))."""
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * scale
