import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypflow.errors import DomainError
from hypflow.shapes import make_rng
from hypflow.symfun import (
    elementary_symmetric,
    in_garding_cone,
    newton_maclaurin_margins,
    newton_tensor_diag,
    random_cone_tuples,
    sigma_all,
    verify_trace_identities,
)

entries = st.floats(-2.0, 5.0, allow_nan=False, allow_infinity=False)
tuples = st.integers(2, 9).flatmap(lambda d: st.lists(entries, min_size=d, max_size=d))


def brute_sigma(k, m):
    return sum(math.prod(c) for c in itertools.combinations(k, m))


@pytest.mark.parametrize(
    "kappa, m, expected",
    [([1, 1, 1], 2, 3.0), ([1, 2, 3], 2, 11.0), ([1, 2, 3], 0, 1.0), ([1, 2, 3], 3, 6.0), ([-1, 2, 2], 2, 0.0)],
)
def test_elementary_symmetric_examples(kappa, m, expected):
    assert elementary_symmetric(kappa, m) == expected


def test_constant_tuple_is_binomial():
    for d in range(2, 8):
        for m in range(d + 1):
            assert elementary_symmetric([1.7] * d, m) == pytest.approx(math.comb(d, m) * 1.7**m, rel=1e-14)


@pytest.mark.parametrize("m", [-1, 4])
def test_elementary_symmetric_range(m):
    with pytest.raises(DomainError):
        elementary_symmetric([1, 2, 3], m)


def test_rejects_bad_tuples():
    with pytest.raises(DomainError):
        elementary_symmetric([1.0], 1)
    with pytest.raises(DomainError):
        elementary_symmetric([1.0, np.nan], 1)


def test_sigma_all_matches_subsets_on_long_tuple():
    k = make_rng(3).uniform(-1, 1, size=24)
    s = sigma_all(k)
    for m in (1, 2, 3):
        assert s[m] == pytest.approx(brute_sigma(k, m), rel=1e-12, abs=1e-12)


def test_sigma_all_batches():
    k = make_rng(1).uniform(-2, 5, size=(7, 5, 4))
    s = sigma_all(k)
    assert s.shape == (7, 5, 5)
    assert s[3, 2, 2] == pytest.approx(brute_sigma(k[3, 2], 2))


def test_newton_tensor_examples():
    np.testing.assert_array_equal(newton_tensor_diag([1, 2, 3], 2), [5, 4, 3])
    np.testing.assert_array_equal(newton_tensor_diag([1, 1, 1], 1), [1, 1, 1])
    assert newton_tensor_diag([1, 2, 3], 2) @ np.array([1, 2, 3]) == 22 == 2 * elementary_symmetric([1, 2, 3], 2)


def test_trace_identity_examples():
    check = verify_trace_identities([1, 2, 3], 2)
    assert check.passed and check.residuals == (0.0, 0.0, 0.0)
    assert verify_trace_identities([1, 1, 1], 1).residuals == (0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        verify_trace_identities([1, 2, 3], 3)


def test_exact_mode_detects_wrong_identity(monkeypatch):
    import hypflow.symfun as sf

    real = sf._sigma_seq
    monkeypatch.setattr(sf, "_sigma_seq", lambda a: [x + (i == 1) for i, x in enumerate(real(a))])
    assert not sf.verify_trace_identities([0.5, 1.25, 3.0], 2, exact=True).passed


@given(tuples, st.data())
def test_trace_identities_property(k, data):
    m = data.draw(st.integers(1, len(k) - 1))
    exact = verify_trace_identities(k, m, exact=True)
    assert exact.residuals == (0.0, 0.0, 0.0)
    # double precision: residuals at the rounding level of the largest term
    scale = 1.0 + max(abs(x) for x in sigma_all(k)) * (1.0 + sum(abs(x) for x in k)) ** 2
    assert max(abs(x) for x in verify_trace_identities(k, m).residuals) <= 64 * np.finfo(float).eps * scale


@given(tuples, st.data())
def test_symmetry_under_permutation(k, data):
    perm = data.draw(st.permutations(k))
    np.testing.assert_allclose(sigma_all(perm), sigma_all(k), rtol=1e-12, atol=1e-9)


@given(tuples, st.floats(0.1, 3.0))
def test_homogeneity(k, t):
    s, st_ = sigma_all(k), sigma_all(np.multiply(t, k))
    for m in range(len(k) + 1):
        assert st_[m] == pytest.approx(t**m * s[m], rel=1e-9, abs=1e-8 * max(1.0, t) ** m)


def test_garding_cone_examples():
    assert in_garding_cone([1, 1, 1], 2)
    assert not in_garding_cone([-1, 2, 2], 2)
    assert in_garding_cone([3, 3, -0.5], 1) and in_garding_cone([3, 3, -0.5], 2)


def test_newton_maclaurin_examples():
    r1, b1, r2, b2 = newton_maclaurin_margins([2.0, 2.0, 2.0], 2)
    assert r2 == pytest.approx(b2, abs=1e-15) and b2 == 3.0
    assert r1 == pytest.approx(b1, abs=1e-15)
    r1, b1, r2, b2 = newton_maclaurin_margins([1, 2, 3], 2)
    assert r2 == pytest.approx(36 / 11) and r2 > b2
    with pytest.raises(ZeroDivisionError):
        newton_maclaurin_margins([-1, 2, 2], 2)


@settings(max_examples=200)
@given(st.integers(4, 8), st.integers(0, 2**32 - 1))
def test_newton_maclaurin_property(n, seed):
    k = random_cone_tuples(make_rng(seed), n, 1)[0]
    assert in_garding_cone(k, 2)
    for m in (1, 2):
        r1, b1, r2, b2 = newton_maclaurin_margins(k, m)
        assert r1 <= b1 + 1e-12 and r2 >= b2 - 1e-12


def test_random_cone_tuples_are_seeded_and_in_box():
    a = random_cone_tuples(make_rng(5), 6, 100)
    b = random_cone_tuples(make_rng(5), 6, 100)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (100, 5) and a.min() > -2 and a.max() < 5
    assert all(in_garding_cone(k, 2) for k in a)
