import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from framesplit.errors import FormatError, PreconditionError, UsageError
from framesplit.gen import GenConfig, random_frame, random_split_pair, random_subset
from framesplit.linalg import PSD_TOL, HermitianOperator, opnorm
from framesplit.splitting import (IndexSubset, QuadraticCertificate, SplitPair, certificate_nonneg,
                                  check_lemma_part, lemma_certificate, partial_frame_operator,
                                  residual_split, residuals, split_from_subset)

seeds = st.integers(0, 2**32 - 1)


def frame_split(seed, d=None):
    rng = np.random.default_rng(seed)
    d = d or int(rng.integers(2, 7))
    m = int(rng.integers(d, 2 * d + 1))
    fr = random_frame(GenConfig(d, m, seed))
    return split_from_subset(fr, random_subset(m, seed))


def any_split(seed):
    return frame_split(seed) if seed % 2 else random_split_pair(2 + seed % 6, seed)


# --- subsets -----------------------------------------------------------------

@pytest.mark.parametrize("text, members", [
    ("0,2-4", (0, 2, 3, 4)), ("", ()), ("none", ()), ("all", (0, 1, 2, 3, 4, 5)),
    ("5, 1 - 2", (1, 2, 5)), ("3,3", (3,)),
])
def test_subset_parse(text, members):
    assert IndexSubset.parse(text, 6).members == members


@pytest.mark.parametrize("text", ["x", "1-", "4-2", "0,7", "-1"])
def test_subset_parse_rejects(text):
    with pytest.raises(FormatError):
        IndexSubset.parse(text, 6)


def test_subset_str_and_complement():
    j = IndexSubset(8, (0, 2, 3, 4, 7))
    assert str(j) == "0,2-4,7"
    assert IndexSubset.parse(str(j), 8) == j
    assert j.complement().members == (1, 5, 6)
    assert str(IndexSubset(3)) == "none"
    with pytest.raises(UsageError):
        IndexSubset(3, (3,))


@given(st.integers(1, 40), seeds)
def test_subset_and_complement_partition(m, seed):
    j = random_subset(m, seed)
    c = j.complement()
    assert sorted(j.members + c.members) == list(range(m))


# --- partial frame operators and splits --------------------------------------

def test_partial_frame_operator_examples(onb2, double_onb2):
    np.testing.assert_array_equal(partial_frame_operator(onb2, IndexSubset(2)).matrix, np.zeros((2, 2)))
    np.testing.assert_array_equal(partial_frame_operator(onb2, IndexSubset(2, (0,))).matrix, np.diag([1, 0]))
    np.testing.assert_array_equal(partial_frame_operator(double_onb2, IndexSubset(4, (0, 1))).matrix, np.eye(2))
    with pytest.raises(UsageError):
        partial_frame_operator(onb2, IndexSubset(3))


def test_split_from_subset_examples(onb2, double_onb2, mb3):
    sp = split_from_subset(onb2, IndexSubset(2, (0,)))
    np.testing.assert_array_equal(sp.part1.matrix, np.diag([1, 0]))
    np.testing.assert_array_equal(sp.part2.matrix, np.diag([0, 1]))
    sp = split_from_subset(double_onb2, IndexSubset(4, (0, 1)))
    np.testing.assert_array_equal(sp.total.matrix, 2 * np.eye(2))
    np.testing.assert_array_equal(sp.part1.matrix, np.eye(2))
    sp = split_from_subset(mb3, IndexSubset(3, (0,)))
    f0 = mb3.vectors[0]
    np.testing.assert_allclose(sp.total.matrix, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(sp.part1.matrix, np.outer(f0, f0.conj()), atol=1e-15)
    np.testing.assert_allclose(sp.part2.matrix, np.eye(2) - np.outer(f0, f0.conj()), atol=1e-15)


def test_split_pair_validation():
    eye = HermitianOperator.identity(2)
    with pytest.raises(PreconditionError):
        SplitPair(eye, eye, eye)
    with pytest.raises(PreconditionError):
        SplitPair.from_parts(HermitianOperator.diag([2, 1]), HermitianOperator.diag([-1, 0]))
    with pytest.raises(PreconditionError):
        SplitPair.from_parts(HermitianOperator.diag([1, 0]), HermitianOperator.diag([1, 0]))


def test_residual_examples(projector_split, halves_split):
    r = residuals(projector_split)
    np.testing.assert_allclose(r.u.matrix, np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(r.v.matrix, np.diag([0, 1]), atol=1e-15)
    r = residuals(halves_split)
    np.testing.assert_allclose(r.u.matrix, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(r.v.matrix, np.eye(2) / 2, atol=1e-15)


@given(seeds)
def test_residual_spectrum_in_unit_interval(seed):
    r = residuals(any_split(seed))
    assert opnorm(r.u.matrix + r.v.matrix - np.eye(r.u.dim)) <= PSD_TOL
    for op in (r.u, r.v):
        assert -PSD_TOL <= op.spectrum.min and op.spectrum.max <= 1 + PSD_TOL


# --- certificates ------------------------------------------------------------

def dense_min(q, n=10_001):
    a = np.linspace(0.0, 1.0, n)
    return float(np.min((q.c2 * a + q.c1) * a + q.c0))


@pytest.mark.parametrize("coeffs, expected", [
    ((1, -1, 0.25), True),   # (a - 1/2)^2
    ((1, -3, 1), False),     # value -1 at a = 1
    ((0, 0, 0), True),
    ((-1, 1, 0), True),      # a (1 - a), zero at both ends
    ((1, 0, -1e-13), True),  # within the 1e-12 slack
])
def test_certificate_examples(coeffs, expected):
    assert certificate_nonneg(QuadraticCertificate(*coeffs)) is expected


@given(st.tuples(*[st.floats(-3, 3)] * 3))
def test_certificate_matches_dense_sampling(coeffs):
    q = QuadraticCertificate(*coeffs)
    sampled = dense_min(q)
    assume(abs(sampled) > 1e-9)
    assert certificate_nonneg(q) is (sampled >= 0)


@given(st.floats(-5, 5))
def test_lemma_certificates_reduce_to_square(lam):
    # p, q from each lambda family make the certificate (a - lam/2)^2
    p5, q5 = lam - lam**2 / 4, 1 - lam**2 / 4
    p6, q6 = lam - 1, (1 - lam / 2) ** 2
    p7, q7 = 2 * lam - lam**2 / 2 - 1, 1 - lam**2 / 2
    for part, p, q in ((5, p5, q5), (6, p6, q6), (7, p7, q7)):
        c = lemma_certificate(part, p, q)
        np.testing.assert_allclose([c.c2, c.c1, c.c0], [1, -lam, lam**2 / 4], atol=1e-12)


# --- lemma parts -------------------------------------------------------------

def test_lemma_examples(projector_split, halves_split):
    rep = check_lemma_part(projector_split, 4)
    assert rep.deviation == 0 and rep.passed
    rep = check_lemma_part(halves_split, 2)
    assert rep.margin == pytest.approx(0.5, abs=1e-15)
    for k in (1, 2, 3, 4):
        assert check_lemma_part(halves_split, k).passed


def test_lemma_argument_contract(halves_split):
    with pytest.raises(UsageError):
        check_lemma_part(halves_split, 5)
    with pytest.raises(UsageError):
        check_lemma_part(halves_split, 2, 1.0, 1.0)
    with pytest.raises(UsageError):
        check_lemma_part(halves_split, 8)


def test_failing_certificate_is_inapplicable(projector_split):
    # rho for p = q = 2 is a^2 - a - 1 < 0 on [0, 1]
    rep = check_lemma_part(projector_split, 5, 2.0, 2.0)
    assert rep.outcome == "inapplicable" and rep.margin is None
    forced = check_lemma_part(projector_split, 5, 2.0, 2.0, force=True)
    assert forced.outcome == "failed" and forced.margin == pytest.approx(-1)


@given(seeds)
def test_lemma_parts_1_to_4_hold(seed):
    sp = any_split(seed)
    for k in (1, 2, 3, 4):
        assert check_lemma_part(sp, k).passed, k


@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_certified_parts_hold(seed, p, q):
    sp = any_split(seed)
    for part in (5, 6, 7):
        rep = check_lemma_part(sp, part, p, q)
        if lemma_certificate(part, p, q).nonneg_on_unit_interval():
            assert rep.passed, (part, rep)
        else:
            assert rep.outcome == "inapplicable"


@pytest.mark.parametrize("seed", range(60))
def test_conjugation_consistency(seed):
    sp = any_split(seed)
    rs = residual_split(sp)
    rng = np.random.default_rng(seed)
    for part in range(1, 8):
        pq = tuple(rng.uniform(-2, 2, 2)) if part >= 5 else (None, None)
        a = check_lemma_part(sp, part, *pq, force=True)
        b = check_lemma_part(rs, part, *pq, force=True)
        if min(abs(a.margin) / a.scale, abs(b.margin) / b.scale) < 1e-7 and part != 4:
            continue  # sign of a near-zero margin is not meaningful
        assert a.passed == b.passed, (part, a.margin, b.margin)
