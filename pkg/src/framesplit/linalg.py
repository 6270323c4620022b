"""Dense complex linear algebra: Hermitian operators, spectral calculus, Loewner order.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  Hermitian
operators wrap such an array after symmetrization and expose cached spectral
data.  All tolerances are relative to ``max(1, ||S||_2)`` of the operator that
governs a check.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DomainError, EigenSolverError, NotHermitianError, UsageError

PSD_TOL = 1e-9
EIG_TOL = 1e-10
DEFECT_TOL = 1e-12

TOL_ENV_VAR = "FRAMESPLIT_TOL"


def psd_tolerance_from_env(environ: Optional[Mapping[str, str]] = None) -> float:
    """Return the PSD tolerance, honouring ``FRAMESPLIT_TOL`` when set."""
    environ = os.environ if environ is None else environ
    raw = environ.get(TOL_ENV_VAR)
    if raw is None or raw.strip() == "":
        return PSD_TOL
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV_VAR}={raw!r} is not a number") from None
    if not math.isfinite(value) or value < 0:
        raise UsageError(f"{TOL_ENV_VAR} must be a finite nonnegative number, got {raw!r}")
    return value


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array (a copy)."""
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise UsageError(f"{name} must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError(f"{name} contains NaN or Inf entries")
    return arr


def opnorm(a: np.ndarray) -> float:
    """Spectral norm of a dense matrix."""
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues and matching orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1])


class HermitianOperator:
    """A validated Hermitian matrix.

    The input is symmetrized as ``(H + H*)/2``; the spectral norm of the
    discarded skew part is kept as ``hermitian_defect``.  Construction fails
    when the defect exceeds ``DEFECT_TOL * max(1, defect_scale)``, where
    ``defect_scale`` defaults to ``||H||_2``.  Callers that build ``H`` as a
    product of operators pass the product of the operand norms instead, since
    that is the scale at which roundoff accrues.
    """

    def __init__(self, matrix, *, defect_scale: Optional[float] = None):
        arr = as_complex_matrix(matrix)
        if arr.shape[0] != arr.shape[1]:
            raise UsageError(f"Hermitian operator must be square, got shape {arr.shape}")
        skew = 0.5 * (arr - arr.conj().T)
        sym = 0.5 * (arr + arr.conj().T)
        defect = opnorm(skew) if np.any(skew) else 0.0
        if defect:
            ref = opnorm(sym) if defect_scale is None else float(defect_scale)
            if defect > DEFECT_TOL * max(1.0, ref):
                raise NotHermitianError(
                    f"matrix is not Hermitian: ||H - H*||/2 = {defect:.3e} exceeds "
                    f"{DEFECT_TOL:g} * max(1, {ref:.3e})"
                )
        sym.setflags(write=False)
        self._matrix = sym
        self._defect = defect

    @classmethod
    def _trusted(cls, matrix: np.ndarray) -> "HermitianOperator":
        # matrix is already exactly Hermitian (e.g. a sum of Hermitian operators)
        obj = cls.__new__(cls)
        matrix.setflags(write=False)
        obj._matrix = matrix
        obj._defect = 0.0
        return obj

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls._trusted(np.eye(dim, dtype=np.complex128))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianOperator":
        return cls._trusted(np.zeros((dim, dim), dtype=np.complex128))

    @classmethod
    def diag(cls, values) -> "HermitianOperator":
        return cls._trusted(np.diag(np.asarray(values, dtype=float)).astype(np.complex128))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def hermitian_defect(self) -> float:
        return self._defect

    @cached_property
    def norm(self) -> float:
        return opnorm(self._matrix)

    @property
    def scale(self) -> float:
        """``max(1, ||H||_2)``, the normalization used by every tolerance."""
        return max(1.0, self.norm)

    @cached_property
    def spectrum(self) -> Spectrum:
        return eig_hermitian(self)

    @cached_property
    def inverse(self) -> "HermitianOperator":
        return spectral_apply(self, lambda x: 1.0 / x)

    @cached_property
    def sqrt(self) -> "HermitianOperator":
        return spectral_apply(self, _psd_sqrt(self))

    @cached_property
    def inverse_sqrt(self) -> "HermitianOperator":
        return spectral_apply(self, lambda x: 1.0 / math.sqrt(x))

    def quadratic_form(self, f: np.ndarray) -> float:
        """Return ``<H f, f>``, which is real for Hermitian ``H``."""
        f = np.asarray(f, dtype=np.complex128)
        return float(np.real(np.vdot(f, self._matrix @ f)))

    def _check_dim(self, other: "HermitianOperator") -> None:
        if not isinstance(other, HermitianOperator):
            raise UsageError(f"expected HermitianOperator, got {type(other).__name__}")
        if other.dim != self.dim:
            raise UsageError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_dim(other)
        return HermitianOperator._trusted(self._matrix + other._matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_dim(other)
        return HermitianOperator._trusted(self._matrix - other._matrix)

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator._trusted(-self._matrix)

    def __mul__(self, c: float) -> "HermitianOperator":
        c = float(c)
        return HermitianOperator._trusted(c * self._matrix)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim}, norm={self.norm:.6g})"


def _psd_sqrt(h: HermitianOperator) -> Callable[[float], float]:
    # eigenvalues of a PSD operator may dip a hair below zero; clamp those
    floor = -PSD_TOL * h.scale

    def fn(x: float) -> float:
        if x < 0 and x >= floor:
            return 0.0
        return math.sqrt(x)

    return fn


def _normalize_phases(vecs: np.ndarray) -> np.ndarray:
    # first component with non-negligible modulus becomes real positive
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        idx = int(np.argmax(mags > 1e-12 * mags.max()))
        phase = col[idx] / mags[idx]
        out[:, k] = col / phase
        out[idx, k] = mags[idx]
    return out


def eig_hermitian(h: HermitianOperator) -> Spectrum:
    """Full eigendecomposition of ``h`` with residual and orthonormality checks.

    Eigenvalues are ascending; each eigenvector is scaled so that its first
    non-negligible component is real and positive.
    """
    try:
        w, v = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        # LAPACK reports the number of unconverged off-diagonal elements, not a
        # sweep count; surface whatever the message carries.
        digits = [int(tok) for tok in str(exc).split() if tok.isdigit()]
        raise EigenSolverError(
            f"Hermitian eigensolver did not converge: {exc}",
            iterations=digits[0] if digits else None,
        ) from exc
    v = _normalize_phases(v)
    bound = EIG_TOL * h.scale
    resid = np.linalg.norm(h.matrix @ v - v * w, axis=0)
    worst = float(resid.max())
    if worst > bound:
        raise EigenSolverError(f"eigenpair residual {worst:.3e} exceeds {bound:.3e}")
    ortho = opnorm(v.conj().T @ v - np.eye(h.dim))
    if ortho > EIG_TOL * max(1, h.dim):
        raise EigenSolverError(f"eigenvectors lost orthonormality: {ortho:.3e}")
    w = np.ascontiguousarray(w, dtype=float)
    w.setflags(write=False)
    v.setflags(write=False)
    return Spectrum(w, v)


def spectral_apply(h: HermitianOperator, fn: Callable[[float], float]) -> HermitianOperator:
    """Return ``sum_k fn(lam_k) v_k v_k*`` over the spectrum of ``h``.

    ``fn`` receives each eigenvalue as a Python float.  Raising, or returning a
    complex or non-finite value, counts as being undefined at that eigenvalue.
    """
    spec = h.spectrum
    values = np.empty(h.dim)
    for k, lam in enumerate(spec.eigenvalues):
        lam = float(lam)
        try:
            out = fn(lam)
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainError(f"function undefined at eigenvalue {lam!r}: {exc}", lam) from exc
        if isinstance(out, complex) or not math.isfinite(out):
            raise DomainError(f"function undefined at eigenvalue {lam!r} (got {out!r})", lam)
        values[k] = out
    v = spec.eigenvectors
    mat = (v * values) @ v.conj().T
    return HermitianOperator(mat, defect_scale=max(1.0, float(np.abs(values).max())))


def conjugate(p: HermitianOperator, x: HermitianOperator) -> HermitianOperator:
    """Return ``P X P`` for Hermitian ``P``, symmetrized."""
    p._check_dim(x)
    mat = p.matrix @ x.matrix @ p.matrix
    return HermitianOperator(mat, defect_scale=p.norm**2 * x.norm)


@dataclass(frozen=True)
class MarginReport:
    """Outcome of one verified relation.

    ``margin`` is the minimum eigenvalue of (right side - left side) for an
    operator inequality, ``rhs - lhs`` for a scalar inequality, and minus the
    deviation for an equality.  It is ``None`` when the relation is
    inapplicable (its hypothesis failed, so nothing is asserted).
    """

    relation: str
    margin: Optional[float]
    scale: float
    tol: float
    passed: bool
    outcome: str
    lam: Optional[float] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    note: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_margin(cls, relation: str, margin: float, scale: float, tol: float = PSD_TOL,
                    lam: Optional[float] = None, **kw) -> "MarginReport":
        margin = float(margin)
        passed = margin >= -tol * scale
        return cls(relation, margin, float(scale), tol, passed,
                   "passed" if passed else "failed", lam=lam, **kw)

    @classmethod
    def equality(cls, relation: str, deviation: float, scale: float, tol: float = PSD_TOL,
                 lam: Optional[float] = None, **kw) -> "MarginReport":
        return cls.from_margin(relation, -abs(float(deviation)), scale, tol, lam, **kw)

    @classmethod
    def inapplicable(cls, relation: str, scale: float, tol: float = PSD_TOL,
                     lam: Optional[float] = None, note: str = "") -> "MarginReport":
        return cls(relation, None, float(scale), tol, False, "inapplicable", lam=lam, note=note)

    @property
    def deviation(self) -> Optional[float]:
        return None if self.margin is None else max(0.0, -self.margin)

    def to_dict(self, inputs: Optional[dict] = None) -> dict:
        out = {
            "relation": self.relation,
            "lambda": self.lam,
            "margin": self.margin,
            "scale": self.scale,
            "passed": self.passed,
            "outcome": self.outcome,
            "inputs": dict(inputs or {}),
        }
        if self.lhs is not None:
            out["lhs"] = self.lhs
            out["rhs"] = self.rhs
        if self.note:
            out["note"] = self.note
        return out


def loewner_leq(u: HermitianOperator, v: HermitianOperator, scale: float = 1.0,
                tol: float = PSD_TOL, relation: str = "loewner",
                lam: Optional[float] = None) -> MarginReport:
    """Check ``U <= V`` in the Loewner order; margin is ``lambda_min(V - U)``."""
    if scale < 1:
        raise UsageError(f"scale must be >= 1, got {scale}")
    u._check_dim(v)
    margin = (v - u).spectrum.min
    return MarginReport.from_margin(relation, margin, scale, tol, lam)
