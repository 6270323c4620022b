"""Splittings ``S = S1 + S2`` of a positive definite operator into PSD parts.

Every relation here is checked on the operators themselves.  Conjugating by
``S^-1/2`` maps the parts to commuting contractions ``U + V = I`` (the
residuals); the quadratic certificates describe which scalar polynomials of
``U`` must be nonnegative on [0, 1] for a relation to hold.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from .errors import FormatError, PreconditionError, UsageError
from .frame import Frame
from .linalg import PSD_TOL, HermitianOperator, MarginReport, conjugate, loewner_leq, opnorm

CERTIFICATE_TOL = 1e-12


@dataclass(frozen=True)
class IndexSubset:
    """A subset ``J`` of ``{0, ..., universe - 1}``."""

    universe: int
    members: tuple = ()

    def __post_init__(self):
        if not isinstance(self.universe, (int, np.integer)) or self.universe < 1:
            raise UsageError(f"universe must be a positive integer, got {self.universe!r}")
        members = tuple(sorted({int(i) for i in self.members}))
        if members and (members[0] < 0 or members[-1] >= self.universe):
            raise UsageError(f"subset indices {list(members)} fall outside [0, {self.universe})")
        object.__setattr__(self, "members", members)

    @classmethod
    def full(cls, universe: int) -> "IndexSubset":
        return cls(universe, tuple(range(universe)))

    @classmethod
    def parse(cls, text: str, universe: int) -> "IndexSubset":
        """Parse ``"0,2-4"`` style notation; ``""``/``"none"`` is empty, ``"all"`` is full."""
        text = text.strip()
        if text.lower() in ("", "none", "{}"):
            return cls(universe)
        if text.lower() == "all":
            return cls.full(universe)
        members = []
        for part in text.split(","):
            part = part.strip()
            m = re.fullmatch(r"(\d+)(?:\s*-\s*(\d+))?", part)
            if not m:
                raise FormatError(f"bad subset item {part!r} in {text!r}; use e.g. '0,2-4'")
            lo = int(m.group(1))
            hi = int(m.group(2)) if m.group(2) is not None else lo
            if hi < lo:
                raise FormatError(f"descending range {part!r} in subset {text!r}")
            members.extend(range(lo, hi + 1))
        try:
            return cls(universe, tuple(members))
        except UsageError as exc:
            raise FormatError(str(exc)) from None

    def complement(self) -> "IndexSubset":
        keep = set(self.members)
        return IndexSubset(self.universe, tuple(i for i in range(self.universe) if i not in keep))

    def indicator(self) -> np.ndarray:
        out = np.zeros(self.universe)
        out[list(self.members)] = 1.0
        return out

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __str__(self) -> str:
        if not self.members:
            return "none"
        runs = []
        start = prev = self.members[0]
        for i in self.members[1:]:
            if i == prev + 1:
                prev = i
                continue
            runs.append((start, prev))
            start = prev = i
        runs.append((start, prev))
        return ",".join(str(a) if a == b else f"{a}-{b}" for a, b in runs)


def _check_universe(fr: Frame, subset: IndexSubset) -> None:
    if subset.universe != fr.count:
        raise UsageError(f"subset universe {subset.universe} does not match frame count {fr.count}")


def partial_frame_operator(fr: Frame, subset: IndexSubset) -> HermitianOperator:
    """``S_J = sum_{i in J} f_i f_i*``."""
    _check_universe(fr, subset)
    if not subset.members:
        return HermitianOperator.zeros(fr.dim)
    f = fr.vectors[list(subset.members)].T
    return HermitianOperator(f @ f.conj().T)


class SplitPair:
    """``S = S1 + S2`` with ``S`` positive definite and both parts PSD."""

    def __init__(self, total: HermitianOperator, part1: HermitianOperator,
                 part2: HermitianOperator, tol: float = PSD_TOL):
        total._check_dim(part1)
        total._check_dim(part2)
        self.total, self.part1, self.part2, self.tol = total, part1, part2, tol
        scale = total.scale
        gap = opnorm(total.matrix - part1.matrix - part2.matrix)
        if gap > tol * scale:
            raise PreconditionError(f"||S - (S1 + S2)|| = {gap:.3e} exceeds {tol:g} * {scale:.3g}")
        if not total.spectrum.min > 0:
            raise PreconditionError(f"S is not positive definite (lambda_min = {total.spectrum.min:.3e})")
        for name, part in (("S1", part1), ("S2", part2)):
            low = part.spectrum.min
            if low < -tol * scale:
                raise PreconditionError(f"{name} is not PSD (lambda_min = {low:.3e})")

    @classmethod
    def from_parts(cls, part1: HermitianOperator, part2: HermitianOperator,
                   tol: float = PSD_TOL) -> "SplitPair":
        return cls(part1 + part2, part1, part2, tol)

    @property
    def dim(self) -> int:
        return self.total.dim

    @property
    def scale(self) -> float:
        return self.total.scale

    @property
    def inverse(self) -> HermitianOperator:
        return self.total.inverse

    @cached_property
    def cross1(self) -> HermitianOperator:
        """``S1 S^-1 S1``."""
        return conjugate(self.part1, self.inverse)

    @cached_property
    def cross2(self) -> HermitianOperator:
        """``S2 S^-1 S2``."""
        return conjugate(self.part2, self.inverse)

    def swapped(self) -> "SplitPair":
        return SplitPair(self.total, self.part2, self.part1, self.tol)

    def __repr__(self) -> str:
        return f"SplitPair(dim={self.dim}, scale={self.scale:.6g})"


def split_from_subset(fr: Frame, subset: IndexSubset, tol: float = PSD_TOL) -> SplitPair:
    """``(S, S_J, S_{J^c})``."""
    return SplitPair(fr.frame_operator, partial_frame_operator(fr, subset),
                     partial_frame_operator(fr, subset.complement()), tol)


@dataclass(frozen=True, eq=False)
class ResidualPair:
    """``U = S^-1/2 S1 S^-1/2`` and ``V = S^-1/2 S2 S^-1/2``; ``U + V = I``."""

    u: HermitianOperator
    v: HermitianOperator
    tol: float = PSD_TOL

    def __post_init__(self):
        self.u._check_dim(self.v)
        gap = opnorm(self.u.matrix + self.v.matrix - np.eye(self.u.dim))
        if gap > self.tol:
            raise PreconditionError(f"||U + V - I|| = {gap:.3e} exceeds {self.tol:g}")
        for name, op in (("U", self.u), ("V", self.v)):
            lo, hi = op.spectrum.min, op.spectrum.max
            if lo < -self.tol or hi > 1 + self.tol:
                raise PreconditionError(f"spectrum of {name} = [{lo:.3e}, {hi:.3e}] leaves [0, 1]")


def residuals(sp: SplitPair) -> ResidualPair:
    r = sp.total.inverse_sqrt
    return ResidualPair(conjugate(r, sp.part1), conjugate(r, sp.part2), sp.tol)


def residual_split(sp: SplitPair) -> SplitPair:
    """The same splitting seen after conjugation by ``S^-1/2``: ``(I, U, V)``."""
    res = residuals(sp)
    return SplitPair(HermitianOperator.identity(sp.dim), res.u, res.v, sp.tol)


@dataclass(frozen=True)
class QuadraticCertificate:
    """``c2 a^2 + c1 a + c0``, whose nonnegativity on [0, 1] certifies a relation."""

    c2: float
    c1: float
    c0: float

    @classmethod
    def rho(cls, p: float, q: float) -> "QuadraticCertificate":
        return cls(1.0, q - p - 1.0, 1.0 - q)

    @classmethod
    def eta(cls, p: float, q: float) -> "QuadraticCertificate":
        return cls(1.0, -(1.0 + p), q + p)

    @classmethod
    def tau(cls, p: float, q: float) -> "QuadraticCertificate":
        return cls(1.0, (q - p) / 2.0 - 1.0, (1.0 - q) / 2.0)

    def __call__(self, a):
        return (self.c2 * a + self.c1) * a + self.c0

    def min_on_unit_interval(self) -> float:
        candidates = [self(0.0), self(1.0)]
        if self.c2 != 0:
            vertex = -self.c1 / (2.0 * self.c2)
            if 0.0 < vertex < 1.0:
                candidates.append(self(vertex))
        return float(min(candidates))

    def nonneg_on_unit_interval(self, tol: float = CERTIFICATE_TOL) -> bool:
        return self.min_on_unit_interval() >= -tol


def certificate_nonneg(q: QuadraticCertificate, tol: float = CERTIFICATE_TOL) -> bool:
    return q.nonneg_on_unit_interval(tol)


LEMMA_CERTIFICATES = {5: QuadraticCertificate.rho, 6: QuadraticCertificate.eta,
                      7: QuadraticCertificate.tau}


def lemma_certificate(part: int, p: float, q: float) -> QuadraticCertificate:
    try:
        return LEMMA_CERTIFICATES[part](p, q)
    except KeyError:
        raise UsageError(f"only parts 5-7 carry a certificate, got part {part}") from None


def check_lemma_part(sp: SplitPair, part: int, p: Optional[float] = None,
                     q: Optional[float] = None, tol: Optional[float] = None,
                     force: bool = False) -> MarginReport:
    """Check one of the seven relations of a splitting.

    1. ``0 <= S_i S^-1 S_i`` for both parts (worst margin reported)
    2. ``S2 + S1 S^-1 S1 <= S``
    3. ``S1 S^-1 S1 + S2 S^-1 S2 <= S``
    4. ``S2 + S1 S^-1 S1 == S1 + S2 S^-1 S2`` (margin is minus the deviation norm)
    5. ``p S1 + q S2 <= S2 + S1 S^-1 S1``, certified by ``rho``
    6. ``S1 - S1 S^-1 S1 <= p S2 + q S``, certified by ``eta``
    7. ``p S1 + q S2 <= S1 S^-1 S1 + S2 S^-1 S2``, certified by ``tau``

    For parts 5-7 a failing certificate yields an ``inapplicable`` report unless
    ``force`` is set.
    """
    tol = sp.tol if tol is None else tol
    scale = sp.scale
    rel = f"lemma.part{part}"
    needs_pq = part in LEMMA_CERTIFICATES
    if part not in range(1, 8):
        raise UsageError(f"part must be in 1..7, got {part}")
    if needs_pq != (p is not None and q is not None) or (not needs_pq and (p, q) != (None, None)):
        raise UsageError(f"p and q are required exactly for parts 5-7 (part {part})")

    s, s1, s2 = sp.total, sp.part1, sp.part2
    c1, c2 = sp.cross1, sp.cross2
    if part == 1:
        zero = HermitianOperator.zeros(sp.dim)
        m = min(loewner_leq(zero, c1, scale, tol).margin, loewner_leq(zero, c2, scale, tol).margin)
        return MarginReport.from_margin(rel, m, scale, tol)
    if part == 2:
        return loewner_leq(s2 + c1, s, scale, tol, rel)
    if part == 3:
        return loewner_leq(c1 + c2, s, scale, tol, rel)
    if part == 4:
        return MarginReport.equality(rel, opnorm((s2 + c1).matrix - (s1 + c2).matrix), scale, tol)

    p, q = float(p), float(q)
    cert = lemma_certificate(part, p, q)
    if not force and not cert.nonneg_on_unit_interval():
        return MarginReport.inapplicable(
            rel, scale, tol, note=f"certificate minimum {cert.min_on_unit_interval():.3e} < 0 on [0,1]")
    if part == 5:
        rep = loewner_leq(p * s1 + q * s2, s2 + c1, scale, tol, rel)
    elif part == 6:
        rep = loewner_leq(s1 - c1, p * s2 + q * s, scale, tol, rel)
    else:
        rep = loewner_leq(p * s1 + q * s2, c1 + c2, scale, tol, rel)
    return rep
