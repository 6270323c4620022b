"""Lambda-parametrized frame inequalities and the classical identities they generalize.

Three operator families live on a :class:`~framesplit.splitting.SplitPair`:

* ``t22``  -- ``(lam - lam^2/4) S1 + (1 - lam^2/4) S2 <= S2 + S1 S^-1 S1 = S1 + S2 S^-1 S2 <= S``
* ``t27``  -- ``0 <= S1 - S1 S^-1 S1 <= (lam - 1) S2 + (1 - lam/2)^2 S``
* ``t210`` -- ``(2 lam - lam^2/2 - 1) S1 + (1 - lam^2/2) S2 <= S1 S^-1 S1 + S2 S^-1 S2 <= S``

For each the matching quadratic certificate collapses to ``(a - lam/2)^2``.
The remaining checks evaluate scalar forms on a frame and a test vector, either
through the partial frame operators (``cor25``, ``parseval``, ``general``) or
through a dual frame (``lemma212``, ``dual``, ``t213``, ``weighted``).

Operator reports use the scale ``max(1, ||S||_2)``; scalar reports use
``max(1, sum_i |<f, f_i>|^2)`` or, on the dual side, ``max(1, ||f||^2)``.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import PreconditionError, UsageError
from .frame import Frame, check_dual, check_vector, frame_bounds
from .linalg import PSD_TOL, HermitianOperator, MarginReport, loewner_leq, opnorm
from .splitting import IndexSubset, QuadraticCertificate, SplitPair, _check_universe, split_from_subset

# a frame counts as Parseval when both bounds sit this close to 1
PARSEVAL_TOL = 1e-8
CROSSCHECK_TOL = 1e-8
CLASSICAL_FACTOR = 0.75


class Family(str, enum.Enum):
    MIXED_LOWER = "t22"
    DEFECT_UPPER = "t27"
    DUAL_SUM_LOWER = "t210"


def lambda_coefficients(family, lam: float) -> Tuple[float, float]:
    """The pair ``(p, q)`` that a family assigns to ``lam``."""
    family = Family(family)
    lam = float(lam)
    if not np.isfinite(lam):
        raise UsageError(f"lambda must be finite, got {lam}")
    if family is Family.MIXED_LOWER:
        return lam - lam**2 / 4, 1 - lam**2 / 4
    if family is Family.DEFECT_UPPER:
        return lam - 1, (1 - lam / 2) ** 2
    return 2 * lam - lam**2 / 2 - 1, 1 - lam**2 / 2


_CERTIFICATE_OF = {
    Family.MIXED_LOWER: QuadraticCertificate.rho,
    Family.DEFECT_UPPER: QuadraticCertificate.eta,
    Family.DUAL_SUM_LOWER: QuadraticCertificate.tau,
}


def family_certificate(family, lam: float) -> QuadraticCertificate:
    p, q = lambda_coefficients(family, lam)
    return _CERTIFICATE_OF[Family(family)](p, q)


def _certified(family: Family, lam: float, sp: SplitPair, tol: float, relation: str):
    cert = family_certificate(family, lam)
    ok = cert.nonneg_on_unit_interval()
    extra = {"certificate": (cert.c2, cert.c1, cert.c0), "certificate_ok": ok}
    if not ok:
        # cannot happen for a finite lambda; kept so a broken coefficient map shows up
        return None, extra, MarginReport.inapplicable(relation, sp.scale, tol, lam, "certificate failed")
    return cert, extra, None


def verify_mixed_energy(sp: SplitPair, lam: float, tol: Optional[float] = None) -> List[MarginReport]:
    """Lower bound, middle equality and upper bound of the ``t22`` chain."""
    tol = sp.tol if tol is None else tol
    lam = float(lam)
    p, q = lambda_coefficients(Family.MIXED_LOWER, lam)
    s, s1, s2 = sp.total, sp.part1, sp.part2
    mid = s2 + sp.cross1
    _, extra, bad = _certified(Family.MIXED_LOWER, lam, sp, tol, "t22.lower")
    lower = bad or _with_extra(loewner_leq(p * s1 + q * s2, mid, sp.scale, tol, "t22.lower", lam), extra)
    middle = MarginReport.equality("t22.middle", opnorm(mid.matrix - (s1 + sp.cross2).matrix),
                                   sp.scale, tol, lam)
    upper = loewner_leq(mid, s, sp.scale, tol, "t22.upper", lam)
    return [lower, middle, upper]


def verify_part_defect(sp: SplitPair, lam: float, tol: Optional[float] = None) -> List[MarginReport]:
    """Both sides of the ``t27`` sandwich around ``S1 - S1 S^-1 S1``."""
    tol = sp.tol if tol is None else tol
    lam = float(lam)
    p, q = lambda_coefficients(Family.DEFECT_UPPER, lam)
    defect = sp.part1 - sp.cross1
    zero = HermitianOperator.zeros(sp.dim)
    psd = loewner_leq(zero, defect, sp.scale, tol, "t27.psd", lam)
    _, extra, bad = _certified(Family.DEFECT_UPPER, lam, sp, tol, "t27.upper")
    upper = bad or _with_extra(
        loewner_leq(defect, p * sp.part2 + q * sp.total, sp.scale, tol, "t27.upper", lam), extra)
    return [psd, upper]


def verify_dual_energy_sum(sp: SplitPair, lam: float, tol: Optional[float] = None) -> List[MarginReport]:
    """Lower and upper bound of ``S1 S^-1 S1 + S2 S^-1 S2`` (``t210``)."""
    tol = sp.tol if tol is None else tol
    lam = float(lam)
    p, q = lambda_coefficients(Family.DUAL_SUM_LOWER, lam)
    both = sp.cross1 + sp.cross2
    _, extra, bad = _certified(Family.DUAL_SUM_LOWER, lam, sp, tol, "t210.lower")
    lower = bad or _with_extra(
        loewner_leq(p * sp.part1 + q * sp.part2, both, sp.scale, tol, "t210.lower", lam), extra)
    upper = loewner_leq(both, sp.total, sp.scale, tol, "t210.upper", lam)
    return [lower, upper]


FAMILY_CHECKS = {
    Family.MIXED_LOWER: verify_mixed_energy,
    Family.DEFECT_UPPER: verify_part_defect,
    Family.DUAL_SUM_LOWER: verify_dual_energy_sum,
}


def _with_extra(rep: MarginReport, extra: dict) -> MarginReport:
    rep.extra.update(extra)
    return rep


# --- scalar forms on a frame -------------------------------------------------


@dataclass(frozen=True)
class ScalarBreakdown:
    sum_J: float
    sum_Jc: float
    sum_total: float
    dual_energy_J: float
    dual_energy_Jc: float

    def as_dict(self) -> dict:
        return asdict(self)


def scalar_breakdown(fr: Frame, subset: IndexSubset, f) -> ScalarBreakdown:
    """The five energies, computed from analysis coefficients and vector sums.

    ``dual_energy_J = sum_i |<S^-1 S_J f, f_i>|^2`` with ``S_J f`` synthesized
    from the coefficients on ``J``.
    """
    _check_universe(fr, subset)
    f = check_vector(f, fr.dim)
    coeffs = fr.analysis_coefficients(f)
    energy = np.abs(coeffs) ** 2
    members = list(subset.members)
    others = list(subset.complement().members)
    s_inv = fr.frame_operator.inverse.matrix

    def dual_energy(idx):
        if not idx:
            return 0.0
        g = s_inv @ fr.synthesize(coeffs, idx)
        return float(np.sum(np.abs(fr.analysis_coefficients(g)) ** 2))

    return ScalarBreakdown(
        sum_J=float(energy[members].sum()),
        sum_Jc=float(energy[others].sum()),
        sum_total=float(energy.sum()),
        dual_energy_J=dual_energy(members),
        dual_energy_Jc=dual_energy(others),
    )


def operator_breakdown(fr: Frame, subset: IndexSubset, f) -> ScalarBreakdown:
    """The same five energies as quadratic forms of ``S_J``, ``S`` and ``S_J S^-1 S_J``."""
    f = check_vector(f, fr.dim)
    sp = split_from_subset(fr, subset)
    return ScalarBreakdown(
        sum_J=sp.part1.quadratic_form(f),
        sum_Jc=sp.part2.quadratic_form(f),
        sum_total=sp.total.quadratic_form(f),
        dual_energy_J=sp.cross1.quadratic_form(f),
        dual_energy_Jc=sp.cross2.quadratic_form(f),
    )


def _scalar_scale(b: ScalarBreakdown) -> float:
    return max(1.0, b.sum_total)


def _scalar_leq(relation, lhs, rhs, scale, tol, lam=None, **kw) -> MarginReport:
    return MarginReport.from_margin(relation, rhs - lhs, scale, tol, lam, lhs=float(lhs), rhs=float(rhs), **kw)


def _scalar_eq(relation, lhs, rhs, scale, tol, lam=None) -> MarginReport:
    return MarginReport.equality(relation, lhs - rhs, scale, tol, lam, lhs=float(lhs), rhs=float(rhs))


def verify_mixed_energy_scalar(fr: Frame, subset: IndexSubset, f, lam: float,
                               tol: float = PSD_TOL) -> List[MarginReport]:
    """Scalar form of the ``t22`` chain for one vector (``cor25``).

    The fourth report compares each scalar with the quadratic form of its
    operator expression and fails when they differ by more than
    ``CROSSCHECK_TOL`` relative to ``max(1, ||S|| ||f||^2)``.
    """
    lam = float(lam)
    p, q = lambda_coefficients(Family.MIXED_LOWER, lam)
    b = scalar_breakdown(fr, subset, f)
    scale = _scalar_scale(b)
    low = p * b.sum_J + q * b.sum_Jc
    mid1 = b.sum_Jc + b.dual_energy_J
    mid2 = b.sum_J + b.dual_energy_Jc
    reports = [
        _scalar_leq("cor25.lower", low, mid1, scale, tol, lam),
        _scalar_eq("cor25.middle", mid1, mid2, scale, tol, lam),
        _scalar_leq("cor25.upper", mid1, b.sum_total, scale, tol, lam),
    ]
    ops = operator_breakdown(fr, subset, f)
    sp = split_from_subset(fr, subset)
    f = np.asarray(f, dtype=np.complex128)
    op_low = (p * sp.part1 + q * sp.part2).quadratic_form(f)
    dev = max(
        abs(op_low - low),
        abs(ops.sum_Jc + ops.dual_energy_J - mid1),
        abs(ops.sum_J + ops.dual_energy_Jc - mid2),
        abs(ops.sum_total - b.sum_total),
    )
    cscale = max(1.0, sp.total.norm * float(np.vdot(f, f).real))
    reports.append(MarginReport.equality("cor25.consistency", dev, cscale, CROSSCHECK_TOL, lam))
    return reports


def _is_parseval(fr: Frame) -> bool:
    bounds = frame_bounds(fr)
    return abs(bounds.lower - 1) <= PARSEVAL_TOL and abs(bounds.upper - 1) <= PARSEVAL_TOL


def verify_parseval_identity(fr: Frame, subset: IndexSubset, f, tol: float = PSD_TOL) -> List[MarginReport]:
    """Symmetric identity and the 3/4 bound for a Parseval frame.

    ``sum_J |<f,f_i>|^2 + ||sum_{J^c} <f,f_i> f_i||^2`` equals the same
    expression with ``J`` and ``J^c`` exchanged, and is at least ``3/4 ||f||^2``.
    """
    bounds = frame_bounds(fr)
    if not _is_parseval(fr):
        raise PreconditionError(
            f"frame is not Parseval: bounds ({bounds.lower!r}, {bounds.upper!r}) differ from 1 "
            f"by more than {PARSEVAL_TOL:g}")
    _check_universe(fr, subset)
    f = check_vector(f, fr.dim)
    coeffs = fr.analysis_coefficients(f)
    energy = np.abs(coeffs) ** 2
    members, others = list(subset.members), list(subset.complement().members)
    left = energy[members].sum() + _norm_sq(fr.synthesize(coeffs, others))
    right = energy[others].sum() + _norm_sq(fr.synthesize(coeffs, members))
    norm_f = _norm_sq(f)
    scale = max(1.0, norm_f)
    return [
        _scalar_eq("parseval.identity", left, right, scale, tol),
        _scalar_leq("parseval.bound", CLASSICAL_FACTOR * norm_f, left, scale, tol),
    ]


def verify_general_identity(fr: Frame, subset: IndexSubset, f, tol: float = PSD_TOL) -> List[MarginReport]:
    """Symmetric identity and the 3/4 bound for an arbitrary frame.

    The energies of ``S_J f`` and ``S_{J^c} f`` are measured against the
    canonical dual vectors and cross-checked against ``scalar_breakdown``.
    """
    _check_universe(fr, subset)
    f = check_vector(f, fr.dim)
    coeffs = fr.analysis_coefficients(f)
    energy = np.abs(coeffs) ** 2
    members, others = list(subset.members), list(subset.complement().members)
    dual_vectors = fr.vectors @ fr.frame_operator.inverse.matrix.T  # rows S^-1 f_i

    def dual_energy(idx):
        sjf = fr.synthesize(coeffs, idx) if idx else np.zeros(fr.dim, dtype=np.complex128)
        return float(np.sum(np.abs(dual_vectors.conj() @ sjf) ** 2))

    e_j, e_jc = dual_energy(members), dual_energy(others)
    total = float(energy.sum())
    left = energy[members].sum() + e_jc
    right = energy[others].sum() + e_j
    scale = max(1.0, total)
    b = scalar_breakdown(fr, subset, f)
    cross = max(abs(e_j - b.dual_energy_J), abs(e_jc - b.dual_energy_Jc))
    return [
        _scalar_eq("general.identity", left, right, scale, tol),
        _scalar_leq("general.bound", CLASSICAL_FACTOR * total, right, scale, tol),
        MarginReport.equality("general.crosscheck", cross, scale, CROSSCHECK_TOL),
    ]


def _norm_sq(x) -> float:
    return float(np.vdot(x, x).real)


# --- dual-frame side ---------------------------------------------------------


def identity_split_margin(u, v, lam: float, tol: float = PSD_TOL) -> MarginReport:
    """``lambda_min(U*U + lam (V* + V) - lam (2 - lam) I)`` for ``U + V = I``.

    ``U`` need not be normal; the tested operator is Hermitian regardless.
    """
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape != v.shape:
        raise UsageError(f"U and V must be square of equal shape, got {u.shape} and {v.shape}")
    lam = float(lam)
    n = u.shape[0]
    nu = opnorm(u)
    gap = opnorm(u + v - np.eye(n))
    if gap > tol * max(1.0, nu):
        raise PreconditionError(f"U + V differs from I by {gap:.3e}")
    op = u.conj().T @ u + lam * (v.conj().T + v) - lam * (2 - lam) * np.eye(n)
    h = HermitianOperator(op, defect_scale=nu**2 + 2 * abs(lam) * opnorm(v) + abs(lam * (2 - lam)))
    return MarginReport.from_margin("lemma212", h.spectrum.min, max(1.0, nu**2), tol, lam)


def dual_split_operators(fr: Frame, dual: Frame, subset: IndexSubset) -> Tuple[np.ndarray, np.ndarray]:
    """``(U, V)`` with ``U f = sum_{J^c} <f, g_i> f_i`` and ``V f = sum_J <f, g_i> f_i``."""
    _check_universe(fr, subset)
    members, others = list(subset.members), list(subset.complement().members)
    f, g = fr.synthesis_matrix(), dual.synthesis_matrix()
    u = f[:, others] @ g[:, others].conj().T
    v = f[:, members] @ g[:, members].conj().T
    return u, v


@dataclass(frozen=True)
class DualSideQuantities:
    re_J: float
    re_Jc: float
    norm_sq_J: float
    norm_sq_Jc: float


def dual_side_quantities(fr: Frame, dual: Frame, subset: IndexSubset, f,
                         tol: float = PSD_TOL) -> DualSideQuantities:
    check_dual(fr, dual, tol)
    _check_universe(fr, subset)
    f = check_vector(f, fr.dim)
    a = dual.analysis_coefficients(f)
    c = fr.analysis_coefficients(f)
    prod = a * c.conj()
    members, others = list(subset.members), list(subset.complement().members)
    return DualSideQuantities(
        re_J=float(prod[members].sum().real),
        re_Jc=float(prod[others].sum().real),
        norm_sq_J=_norm_sq(fr.synthesize(a, members)),
        norm_sq_Jc=_norm_sq(fr.synthesize(a, others)),
    )


def _dual_scale(f, *values) -> float:
    return max(1.0, _norm_sq(f), *(abs(x) for x in values))


def verify_dual_identity(fr: Frame, dual: Frame, subset: IndexSubset, f,
                         tol: float = PSD_TOL) -> List[MarginReport]:
    """``Re sum_J <f,g_i> conj<f,f_i> + ||sum_{J^c} <f,g_i> f_i||^2`` is symmetric in
    ``J``/``J^c`` and at least ``3/4 ||f||^2``."""
    d = dual_side_quantities(fr, dual, subset, f, tol)
    norm_f = _norm_sq(f)
    left = d.re_J + d.norm_sq_Jc
    right = d.re_Jc + d.norm_sq_J
    scale = _dual_scale(f, d.norm_sq_J, d.norm_sq_Jc)
    return [
        _scalar_eq("dual.identity", left, right, scale, tol),
        _scalar_leq("dual.bound", CLASSICAL_FACTOR * norm_f, left, scale, tol),
    ]


def dual_split_coefficients(lam: float) -> Tuple[float, float]:
    lam = float(lam)
    return 2 * lam - lam**2, 1 - lam**2


def verify_dual_split(fr: Frame, dual: Frame, subset: IndexSubset, f, lam: float,
                      tol: float = PSD_TOL) -> MarginReport:
    """``re_J + norm_sq_Jc >= (2 lam - lam^2) re_J + (1 - lam^2) re_Jc`` (``t213``)."""
    d = dual_side_quantities(fr, dual, subset, f, tol)
    a, b = dual_split_coefficients(lam)
    big = d.re_J + d.norm_sq_Jc
    small = a * d.re_J + b * d.re_Jc
    rep = _scalar_leq("t213", small, big, _dual_scale(f, d.norm_sq_J, d.norm_sq_Jc), tol, float(lam))
    rep.extra.update(asdict(d))
    return rep


def verify_weighted_dual_split(fr: Frame, dual: Frame, weights, f, lam: float,
                               tol: float = PSD_TOL) -> MarginReport:
    """Weighted form: ``U f = sum a_i <f,g_i> f_i``, ``V f = sum (1 - a_i) <f,g_i> f_i``.

    Checks ``Re<Vf, f> + ||U f||^2 >= (2 lam - lam^2) Re<Vf, f> + (1 - lam^2) Re<Uf, f>``.
    Both sums run over every index, so ``U + V = I``; the indicator of ``J^c``
    reproduces :func:`verify_dual_split`.
    """
    check_dual(fr, dual, tol)
    f = check_vector(f, fr.dim)
    w = np.asarray(weights, dtype=np.complex128)
    if w.shape != (fr.count,):
        raise UsageError(f"weights must have length {fr.count}, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise UsageError("weights contain NaN or Inf entries")
    a = dual.analysis_coefficients(f)
    c = fr.analysis_coefficients(f)
    re_u = float(np.sum(w * a * c.conj()).real)
    re_v = float(np.sum((1 - w) * a * c.conj()).real)
    norm_u = _norm_sq(fr.synthesize(w * a))
    norm_v = _norm_sq(fr.synthesize((1 - w) * a))
    p, q = dual_split_coefficients(lam)
    big = re_v + norm_u
    small = p * re_v + q * re_u
    rep = _scalar_leq("weighted", small, big, _dual_scale(f, norm_u, norm_v), tol, float(lam))
    rep.extra.update(re_J=re_v, re_Jc=re_u, norm_sq_J=norm_v, norm_sq_Jc=norm_u)
    return rep
