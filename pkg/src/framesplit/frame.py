"""Finite frames in C^d: frame operator, bounds, duals, and the JSON file format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import _stream
from .errors import FormatError, NotAFrameError, PreconditionError, UsageError
from .linalg import PSD_TOL, HermitianOperator, opnorm

SINGULARITY_FLOOR = 1e-8

CANONICAL = "canonical"
ALTERNATE = "alternate"


class Frame:
    """An indexed family of ``m >= d`` vectors spanning C^d.

    Vectors are stored as the rows of ``vectors`` (shape ``(m, d)``).  Real
    input is embedded into C^d.  A family whose lower frame bound falls below
    ``SINGULARITY_FLOOR * B`` is rejected.
    """

    def __init__(self, vectors, label: Optional[str] = None):
        arr = np.array(vectors, dtype=np.complex128)
        if arr.ndim != 2 or arr.size == 0:
            raise UsageError(f"frame vectors must form a nonempty (m, d) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise UsageError("frame vectors contain NaN or Inf entries")
        m, d = arr.shape
        if m < d:
            raise NotAFrameError(f"{m} vectors cannot span C^{d}")
        arr.setflags(write=False)
        self._vectors = arr
        self.label = label
        spec = self.frame_operator.spectrum
        if not spec.min > SINGULARITY_FLOOR * spec.max:
            raise NotAFrameError(
                f"vectors do not span C^{d} robustly: lower bound {spec.min:.3e} is below "
                f"{SINGULARITY_FLOOR:g} * upper bound {spec.max:.3e}"
            )

    @property
    def vectors(self) -> np.ndarray:
        return self._vectors

    @property
    def dim(self) -> int:
        return self._vectors.shape[1]

    @property
    def count(self) -> int:
        return self._vectors.shape[0]

    def __len__(self) -> int:
        return self.count

    def __repr__(self) -> str:
        return f"Frame(dim={self.dim}, count={self.count}, label={self.label!r})"

    @cached_property
    def frame_operator(self) -> HermitianOperator:
        f = self.synthesis_matrix()
        return HermitianOperator(f @ f.conj().T)

    def synthesis_matrix(self) -> np.ndarray:
        """The d x m matrix whose k-th column is the k-th frame vector."""
        return self._vectors.T

    def analysis_coefficients(self, f) -> np.ndarray:
        """Return ``(<f, f_i>)_i`` with the inner product conjugate-linear in the second slot."""
        f = check_vector(f, self.dim)
        return self._vectors.conj() @ f

    def synthesize(self, coeffs, indices=None) -> np.ndarray:
        """Return ``sum_i c_i f_i``, optionally restricted to ``indices``."""
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if indices is None:
            return coeffs @ self._vectors
        idx = np.asarray(indices, dtype=int)
        return coeffs[idx] @ self._vectors[idx]


def check_vector(f, dim: int) -> np.ndarray:
    f = np.asarray(f, dtype=np.complex128)
    if f.ndim != 1 or f.shape[0] != dim:
        raise UsageError(f"vector must have length {dim}, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise UsageError("vector contains NaN or Inf entries")
    return f


def synthesis_matrix(fr: Frame) -> np.ndarray:
    return fr.synthesis_matrix()


def analysis_coefficients(fr: Frame, f) -> np.ndarray:
    return fr.analysis_coefficients(f)


def frame_operator(fr: Frame) -> HermitianOperator:
    return fr.frame_operator


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float

    @property
    def ratio(self) -> float:
        return self.upper / self.lower

    def is_tight(self, tol: float = PSD_TOL) -> bool:
        return self.upper - self.lower <= tol * max(1.0, self.upper)


def frame_bounds(fr: Frame) -> FrameBounds:
    """Optimal frame bounds, the extreme eigenvalues of the frame operator."""
    spec = fr.frame_operator.spectrum
    return FrameBounds(spec.min, spec.max)


def parseval_deviation(fr: Frame) -> float:
    """``||S - I||_2``."""
    return opnorm(fr.frame_operator.matrix - np.eye(fr.dim))


@dataclass(frozen=True, eq=False)
class DualPair:
    """A frame with a dual frame, validated through ``F G* = I``.

    ``||F G* - I||_2 <= tol`` bounds the reconstruction error of both
    ``sum <f, g_i> f_i`` and ``sum <f, f_i> g_i`` by ``tol * ||f||``.
    """

    frame: Frame
    dual: Frame
    kind: str
    tol: float = PSD_TOL

    def __post_init__(self):
        if self.kind not in (CANONICAL, ALTERNATE):
            raise UsageError(f"dual kind must be {CANONICAL!r} or {ALTERNATE!r}, got {self.kind!r}")
        check_dual(self.frame, self.dual, self.tol)

    @property
    def reconstruction_error(self) -> float:
        return reconstruction_error(self.frame, self.dual)


def reconstruction_error(fr: Frame, dual: Frame) -> float:
    if (fr.dim, fr.count) != (dual.dim, dual.count):
        raise UsageError(
            f"frame is {fr.count}x{fr.dim} but dual is {dual.count}x{dual.dim}"
        )
    f, g = fr.synthesis_matrix(), dual.synthesis_matrix()
    return opnorm(f @ g.conj().T - np.eye(fr.dim))


def check_dual(fr: Frame, dual: Frame, tol: float = PSD_TOL) -> None:
    err = reconstruction_error(fr, dual)
    if err > tol:
        raise PreconditionError(f"not a dual pair: ||F G* - I|| = {err:.3e} exceeds {tol:g}")


def canonical_dual(fr: Frame, tol: float = PSD_TOL) -> DualPair:
    """Dual vectors ``S^-1 f_i``."""
    s_inv = fr.frame_operator.inverse.matrix
    g = s_inv @ fr.synthesis_matrix()
    dual = Frame(g.T, label=_derived_label(fr, "canonical dual"))
    return DualPair(fr, dual, CANONICAL, tol)


def to_parseval(fr: Frame) -> Frame:
    """Vectors ``S^-1/2 f_i``; the result has frame operator I."""
    r = fr.frame_operator.inverse_sqrt.matrix
    return Frame((r @ fr.synthesis_matrix()).T, label=_derived_label(fr, "parseval"))


def random_alternate_dual(fr: Frame, seed: int, perturbation: float = 1.0,
                          tol: float = PSD_TOL) -> DualPair:
    """An alternate dual ``G = S^-1 F + W (I - F* S^-1 F)``.

    ``W`` has i.i.d. complex Gaussian entries scaled by ``perturbation``, drawn
    from the counter-based stream for ``seed``.  Every dual frame has this form
    for some ``W``; ``perturbation = 0`` gives the canonical dual.
    """
    perturbation = float(perturbation)
    if not math.isfinite(perturbation) or perturbation < 0:
        raise UsageError(f"perturbation must be finite and nonnegative, got {perturbation}")
    f = fr.synthesis_matrix()
    s_inv = fr.frame_operator.inverse.matrix
    canon = s_inv @ f
    if perturbation == 0:
        g = canon
        kind = CANONICAL
    else:
        w = perturbation * _stream.complex_normal(_stream.stream(seed, _stream.DUAL), (fr.dim, fr.count))
        proj = np.eye(fr.count) - f.conj().T @ canon
        g = canon + w @ proj
        kind = ALTERNATE
    dual = Frame(g.T, label=_derived_label(fr, f"{kind} dual"))
    return DualPair(fr, dual, kind, tol)


def _derived_label(fr: Frame, what: str) -> str:
    return f"{what} of {fr.label}" if fr.label else what


# --- JSON file format -------------------------------------------------------
#
# {"dim": d, "count": m, "label": "...", "vectors": [[[re, im], ...], ...]}


def frame_to_dict(fr: Frame) -> dict:
    return {
        "dim": fr.dim,
        "count": fr.count,
        "label": fr.label or "",
        "vectors": [[[float(z.real), float(z.imag)] for z in vec] for vec in fr.vectors],
    }


def frame_to_json(fr: Frame, indent: Optional[int] = None) -> str:
    return json.dumps(frame_to_dict(fr), indent=indent)


def _reject_constant(name):
    raise FormatError(f"non-finite number {name} is not allowed in frame JSON")


def frame_from_json(text: str) -> Frame:
    """Parse the frame JSON format, rejecting NaN/Inf and shape mismatches."""
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return frame_from_dict(data)


def frame_from_dict(data) -> Frame:
    if not isinstance(data, dict):
        raise FormatError("frame JSON must be an object")
    for key in ("dim", "count", "vectors"):
        if key not in data:
            raise FormatError(f"frame JSON is missing key {key!r}")
    d, m = data["dim"], data["count"]
    if not (isinstance(d, int) and isinstance(m, int)) or isinstance(d, bool) or isinstance(m, bool) \
            or d < 1 or m < 1:
        raise FormatError(f"dim and count must be positive integers, got {d!r}, {m!r}")
    vecs = data["vectors"]
    if not isinstance(vecs, list) or len(vecs) != m:
        got = len(vecs) if isinstance(vecs, list) else type(vecs).__name__
        raise FormatError(f"vectors must be a list of {m} entries, got {got}")
    arr = np.empty((m, d), dtype=np.complex128)
    for i, vec in enumerate(vecs):
        if not isinstance(vec, list) or len(vec) != d:
            raise FormatError(f"vectors[{i}] must be a list of {d} [re, im] pairs")
        for k, pair in enumerate(vec):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
                raise FormatError(f"vectors[{i}][{k}] must be a [re, im] pair of numbers")
            re, im = float(pair[0]), float(pair[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise FormatError(f"vectors[{i}][{k}] is not finite")
            arr[i, k] = complex(re, im)
    label = data.get("label") or None
    if label is not None and not isinstance(label, str):
        raise FormatError("label must be a string")
    return Frame(arr, label=label)
