"""Deterministic generators for frames, splittings, subsets and test vectors.

All randomness comes from counter-based streams keyed by the caller's seed, so
every object is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _stream
from .errors import GenerationError, NotAFrameError, UsageError
from .frame import SINGULARITY_FLOOR, Frame, frame_bounds, to_parseval
from .linalg import PSD_TOL, HermitianOperator
from .splitting import IndexSubset, SplitPair

DEFAULT_CONDITION_CAP = 1e4
MAX_REJECTIONS = 100

_S = math.sqrt(2.0 / 3.0)
_H = math.sqrt(3.0) / 2.0

NAMED_FRAMES = {
    "onb2": [[1, 0], [0, 1]],
    "double_onb2": [[1, 0], [0, 1], [1, 0], [0, 1]],
    "mb3": [[0.0, _S], [-_H * _S, -0.5 * _S], [_H * _S, -0.5 * _S]],
    "weighted_onb": [[1, 0], [1, 0], [0, 1]],
}


@dataclass(frozen=True)
class GenConfig:
    dim: int
    count: int
    seed: int
    condition_cap: float = DEFAULT_CONDITION_CAP

    def __post_init__(self):
        if not 2 <= self.dim <= 64:
            raise UsageError(f"dim must lie in [2, 64], got {self.dim}")
        if self.count < self.dim:
            raise UsageError(f"count ({self.count}) must be at least dim ({self.dim})")
        if not self.condition_cap >= 1:
            raise UsageError(f"condition_cap must be >= 1, got {self.condition_cap}")
        if not 0 <= self.seed < 2**64:
            raise UsageError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def named_frame(name: str) -> Frame:
    try:
        vecs = NAMED_FRAMES[name]
    except KeyError:
        raise UsageError(f"unknown frame {name!r}; known frames: {', '.join(sorted(NAMED_FRAMES))}") from None
    return Frame(vecs, label=name)


def random_frame(cfg: GenConfig) -> Frame:
    """Complex Gaussian frame, redrawn on the next stream until ``B/A <= condition_cap``."""
    for index in range(MAX_REJECTIONS):
        rng = _stream.stream(cfg.seed, _stream.FRAME, index)
        vecs = _stream.complex_normal(rng, (cfg.count, cfg.dim))
        try:
            fr = Frame(vecs, label=f"random:{cfg.dim},{cfg.count},{cfg.seed}")
        except NotAFrameError:
            continue
        if frame_bounds(fr).ratio <= cfg.condition_cap:
            return fr
    raise GenerationError(
        f"{MAX_REJECTIONS} consecutive draws exceeded condition cap {cfg.condition_cap:g} "
        f"for d={cfg.dim}, m={cfg.count}; try a larger condition_cap"
    )


def random_parseval(cfg: GenConfig) -> Frame:
    fr = to_parseval(random_frame(cfg))
    bounds = frame_bounds(fr)
    if abs(bounds.lower - 1) > 1e-9 or abs(bounds.upper - 1) > 1e-9:
        raise GenerationError(f"normalization drifted: bounds ({bounds.lower!r}, {bounds.upper!r})")
    fr.label = f"parseval:{cfg.dim},{cfg.count},{cfg.seed}"
    return fr


def random_subset(m: int, seed: int) -> IndexSubset:
    """Each index joins independently with probability 1/2."""
    if m < 1:
        raise UsageError(f"m must be positive, got {m}")
    keep = _stream.stream(seed, _stream.SUBSET).random(m) < 0.5
    return IndexSubset(m, tuple(np.flatnonzero(keep).tolist()))


def random_unit_vector(dim: int, seed: int) -> np.ndarray:
    if dim < 1:
        raise UsageError(f"dim must be positive, got {dim}")
    v = _stream.complex_normal(_stream.stream(seed, _stream.VECTOR), dim)
    return v / np.linalg.norm(v)


def random_weights(m: int, seed: int, spread: float = 1.0) -> np.ndarray:
    """Complex weights centred at 1/2, for the weighted dual-split check."""
    return 0.5 + spread * _stream.complex_normal(_stream.stream(seed, _stream.WEIGHTS), m)


def random_split_pair(dim: int, seed: int, condition_cap: float = DEFAULT_CONDITION_CAP,
                      tol: float = PSD_TOL) -> SplitPair:
    """``S1 = G1 G1*``, ``S2 = G2 G2*`` with random ranks, ``S = S1 + S2``.

    Draws repeat on successive streams until ``S`` is safely invertible with
    condition number at most ``condition_cap``.  Parts may be singular.
    """
    if dim < 1:
        raise UsageError(f"dim must be positive, got {dim}")
    for index in range(MAX_REJECTIONS):
        rng = _stream.stream(seed, _stream.SPLIT, index)
        r1 = int(rng.integers(0, dim + 1))
        r2 = int(rng.integers(max(dim - r1, 1), dim + 2))
        g1 = _stream.complex_normal(rng, (dim, r1))
        g2 = _stream.complex_normal(rng, (dim, r2))
        s1 = HermitianOperator(g1 @ g1.conj().T) if r1 else HermitianOperator.zeros(dim)
        s2 = HermitianOperator(g2 @ g2.conj().T)
        total = s1 + s2
        lo, hi = total.spectrum.min, total.spectrum.max
        if lo > SINGULARITY_FLOOR * hi and hi <= condition_cap * lo:
            return SplitPair(total, s1, s2, tol)
    raise GenerationError(
        f"{MAX_REJECTIONS} consecutive splittings of dim {dim} exceeded condition cap {condition_cap:g}"
    )
