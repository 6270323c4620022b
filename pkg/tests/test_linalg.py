import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from framesplit.errors import DomainError, NotHermitianError, UsageError
from framesplit.linalg import (EIG_TOL, PSD_TOL, HermitianOperator, MarginReport, conjugate,
                               eig_hermitian, loewner_leq, opnorm, psd_tolerance_from_env,
                               spectral_apply)

from .conftest import random_hermitian

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 8)


def H(a):
    return HermitianOperator(a)


@pytest.mark.parametrize("matrix, expected", [
    (np.eye(2), [1, 1]),
    (np.diag([1.0, 0.0]), [0, 1]),
    ([[2, 1], [1, 2]], [1, 3]),  # (2 - x)^2 - 1 = 0
])
def test_eig_examples(matrix, expected):
    np.testing.assert_allclose(eig_hermitian(H(matrix)).eigenvalues, expected, atol=1e-14)


def test_eigenvector_phase_convention():
    spec = eig_hermitian(H([[2, 1j], [-1j, 2]]))
    for k in range(2):
        col = spec.eigenvectors[:, k]
        assert col[0].imag == 0 and col[0].real > 0


@given(seeds, dims)
def test_eig_reconstructs_and_is_deterministic(seed, n):
    rng = np.random.default_rng(seed)
    h = H(random_hermitian(rng, n))
    spec = eig_hermitian(h)
    v, w = spec.eigenvectors, spec.eigenvalues
    assert np.all(np.diff(w) >= 0)
    assert opnorm(v @ np.diag(w) @ v.conj().T - h.matrix) <= 10 * EIG_TOL * h.scale
    assert opnorm(v.conj().T @ v - np.eye(n)) <= EIG_TOL * n
    again = eig_hermitian(H(h.matrix.copy()))
    assert np.array_equal(again.eigenvalues, w) and np.array_equal(again.eigenvectors, v)


def test_symmetrization_records_defect():
    a = np.array([[1.0, 1e-14], [0.0, 1.0]])
    h = H(a)
    assert np.array_equal(h.matrix, h.matrix.conj().T)
    assert h.hermitian_defect == pytest.approx(0.5e-14, rel=1e-6)


def test_rejects_non_hermitian_and_non_finite():
    with pytest.raises(NotHermitianError):
        H([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(UsageError):
        H([[np.nan, 0], [0, 1]])
    with pytest.raises(UsageError):
        H(np.ones((2, 3)))


def test_spectral_apply_examples():
    np.testing.assert_allclose(spectral_apply(HermitianOperator.identity(2), lambda x: 1 / x).matrix, np.eye(2))
    got = spectral_apply(HermitianOperator.diag([4, 9]), lambda x: x ** -0.5).matrix
    np.testing.assert_allclose(got, np.diag([0.5, 1 / 3]), atol=1e-15)
    np.testing.assert_allclose(spectral_apply(2 * HermitianOperator.identity(2), lambda x: x * x).matrix,
                               4 * np.eye(2))


def test_spectral_apply_domain_error_names_eigenvalue():
    with pytest.raises(DomainError) as info:
        spectral_apply(HermitianOperator.diag([0.0, 2.0]), lambda x: 1 / x)
    assert info.value.eigenvalue == 0.0
    with pytest.raises(DomainError):
        spectral_apply(HermitianOperator.diag([-1.0, 2.0]), math.sqrt)
    with pytest.raises(DomainError):
        spectral_apply(HermitianOperator.diag([-1.0, 2.0]), lambda x: x ** 0.5)  # complex result


@given(seeds, dims)
def test_spectral_identity_and_sqrt_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    s = H(random_hermitian(rng, n, psd=True) + 0.1 * np.eye(n))
    assert opnorm(spectral_apply(s, lambda x: x).matrix - s.matrix) <= EIG_TOL * s.scale * 10
    root = s.sqrt.matrix
    assert opnorm(root @ root - s.matrix) <= 1e-10 * s.scale
    # independent oracles
    np.testing.assert_allclose(root, scipy.linalg.sqrtm(s.matrix), atol=1e-9 * s.scale)
    np.testing.assert_allclose(s.inverse.matrix, np.linalg.inv(s.matrix),
                               atol=1e-9 * opnorm(np.linalg.inv(s.matrix)))


def test_loewner_examples():
    zero, eye = HermitianOperator.zeros(2), HermitianOperator.identity(2)
    rep = loewner_leq(zero, eye, 1)
    assert rep.margin == 1 and rep.passed
    rep = loewner_leq(eye, eye, 1)
    assert rep.margin == 0 and rep.passed
    rep = loewner_leq(HermitianOperator.diag([2, 0]), eye, 1)
    assert rep.margin == pytest.approx(-1) and not rep.passed and rep.outcome == "failed"


def test_loewner_usage_errors():
    with pytest.raises(UsageError):
        loewner_leq(HermitianOperator.identity(2), HermitianOperator.identity(3))
    with pytest.raises(UsageError):
        loewner_leq(HermitianOperator.identity(2), HermitianOperator.identity(2), scale=0.5)


@given(seeds, dims)
def test_loewner_reflexive_and_antisymmetric(seed, n):
    rng = np.random.default_rng(seed)
    u, v = H(random_hermitian(rng, n)), H(random_hermitian(rng, n))
    assert loewner_leq(u, u).passed
    a, b = loewner_leq(u, v), loewner_leq(v, u)
    # lambda_min(X) + lambda_min(-X) = lambda_min(X) - lambda_max(X) <= 0
    assert a.margin + b.margin <= 2 * PSD_TOL


def test_conjugate_examples():
    x = H(np.array([[1.0, 2j], [-2j, 3.0]]))
    np.testing.assert_allclose(conjugate(HermitianOperator.identity(2), x).matrix, x.matrix)
    np.testing.assert_allclose(conjugate(HermitianOperator.diag([2, 1]), HermitianOperator.identity(2)).matrix,
                               np.diag([4, 1]))


@given(seeds, dims)
def test_conjugate_inverse_sqrt_gives_identity(seed, n):
    rng = np.random.default_rng(seed)
    s = H(random_hermitian(rng, n, psd=True) + 0.1 * np.eye(n))
    got = conjugate(s.inverse_sqrt, s).matrix
    assert opnorm(got - np.eye(n)) <= 1e-9


@given(seeds, dims)
def test_conjugation_preserves_order(seed, n):
    rng = np.random.default_rng(seed)
    u = H(random_hermitian(rng, n))
    v = u + H(random_hermitian(rng, n, psd=True))
    p = H(random_hermitian(rng, n, psd=True) + 0.5 * np.eye(n))
    assert loewner_leq(u, v).passed
    assert loewner_leq(conjugate(p, u), conjugate(p, v), scale=max(1, p.norm ** 2 * v.norm)).passed


def test_margin_report_invariant_and_json():
    rep = MarginReport.from_margin("x", -2e-9, 1.0)
    assert not rep.passed
    rep = MarginReport.from_margin("x", -2e-9, 3.0, lam=0.5)
    assert rep.passed
    d = rep.to_dict({"seed": 1})
    assert d["lambda"] == 0.5 and d["inputs"] == {"seed": 1}
    na = MarginReport.inapplicable("y", 1.0)
    assert na.outcome == "inapplicable" and na.margin is None


def test_tolerance_env_override():
    assert psd_tolerance_from_env({}) == PSD_TOL
    assert psd_tolerance_from_env({"FRAMESPLIT_TOL": "1e-6"}) == 1e-6
    with pytest.raises(UsageError):
        psd_tolerance_from_env({"FRAMESPLIT_TOL": "abc"})
    with pytest.raises(UsageError):
        psd_tolerance_from_env({"FRAMESPLIT_TOL": "nan"})
