"""Counter-based random streams.

Every draw is keyed by ``(seed, purpose)`` and positioned by a stream index, so
any value can be regenerated from those three numbers alone without touching a
global RNG.
"""

import numpy as np

_MASK64 = (1 << 64) - 1

# purpose tags keep streams for different objects disjoint under one seed
FRAME = 1
SUBSET = 2
VECTOR = 3
DUAL = 4
SPLIT = 5
WEIGHTS = 6
TRIAL = 7
MISC = 8


def stream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    key = np.array([int(seed) & _MASK64, int(purpose) & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, 0, int(index) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian samples, ``(x + i y)/sqrt(2)``."""
    x = rng.standard_normal(shape)
    y = rng.standard_normal(shape)
    return (x + 1j * y) / np.sqrt(2.0)


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit child seed, a pure function of ``seed`` and ``path``."""
    ss = np.random.SeedSequence([int(seed) & _MASK64, *[int(p) & _MASK64 for p in path]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
