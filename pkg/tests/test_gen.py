import numpy as np
import pytest
from hypothesis import given, strategies as st

from framesplit.errors import GenerationError, UsageError
from framesplit.frame import frame_bounds
from framesplit.gen import (GenConfig, named_frame, random_frame, random_parseval,
                            random_split_pair, random_subset, random_unit_vector)
from framesplit.inequalities import verify_parseval_identity
from framesplit.linalg import opnorm

seeds = st.integers(0, 2**64 - 1)


def test_random_frame_is_deterministic():
    a = random_frame(GenConfig(2, 4, 42, 100))
    b = random_frame(GenConfig(2, 4, 42, 100))
    assert a.vectors.tobytes() == b.vectors.tobytes()
    assert not np.array_equal(a.vectors, random_frame(GenConfig(2, 4, 43, 100)).vectors)


def test_condition_cap_respected():
    assert frame_bounds(random_frame(GenConfig(4, 8, 7, 50))).ratio <= 50


def test_condition_cap_exhaustion():
    with pytest.raises(GenerationError, match="condition"):
        random_frame(GenConfig(4, 8, 7, 1.0))


def test_config_validation():
    for args in ((1, 2, 0), (3, 2, 0), (2, 2, -1), (2, 2, 0, 0.5), (65, 70, 0)):
        with pytest.raises(UsageError):
            GenConfig(*args)


@given(seeds, st.integers(2, 8))
def test_random_frame_is_valid(seed, d):
    fr = random_frame(GenConfig(d, d + seed % (d + 1), seed))
    b = frame_bounds(fr)
    assert b.lower > 0 and b.ratio <= 1e4


@given(seeds, st.integers(2, 6))
def test_random_parseval(seed, d):
    fr = random_parseval(GenConfig(d, 2 * d, seed))
    assert opnorm(fr.frame_operator.matrix - np.eye(d)) <= 1e-9
    f = random_unit_vector(d, seed)
    assert np.sum(np.abs(fr.analysis_coefficients(f)) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_square_parseval_is_unitary():
    fr = random_parseval(GenConfig(3, 3, 5))
    u = fr.synthesis_matrix()
    np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)


@pytest.mark.parametrize("name, bounds", [
    ("onb2", (1, 1)), ("double_onb2", (2, 2)), ("mb3", (1, 1)), ("weighted_onb", (1, 2)),
])
def test_named_frames(name, bounds):
    b = frame_bounds(named_frame(name))
    assert (b.lower, b.upper) == pytest.approx(bounds, abs=1e-15)


def test_named_frame_unknown():
    with pytest.raises(UsageError, match="mb3"):
        named_frame("mercedes")


def test_random_subset():
    assert random_subset(10, 3) == random_subset(10, 3)
    seen = {random_subset(1, s).members for s in range(40)}
    assert seen == {(), (0,)}


@given(st.integers(1, 16), seeds)
def test_random_unit_vector(dim, seed):
    v = random_unit_vector(dim, seed)
    assert abs(np.linalg.norm(v) - 1) <= 1e-14
    np.testing.assert_array_equal(v, random_unit_vector(dim, seed))


@given(seeds, st.integers(1, 8))
def test_random_split_pair(seed, d):
    sp = random_split_pair(d, seed)
    assert sp.total.spectrum.min > 0
    assert sp.total.spectrum.max <= 1e4 * sp.total.spectrum.min


def test_mb3_parseval_identity_many():
    fr = named_frame("mb3")
    for s in range(100):
        reps = verify_parseval_identity(fr, random_subset(3, s), random_unit_vector(2, s))
        assert all(r.passed for r in reps)
