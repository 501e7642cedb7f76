import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nucspec.operators import build_laplacian
from nucspec.resolvent import (
    BandProximityError,
    joukowski_small_root,
    multiplication_resolvent_norm,
    resolvent_block,
    resolvent_entry,
    resolvent_norm_bound,
    small_root,
)
from nucspec.operators import BandSpec

off_band = st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False).filter(
    lambda z: BandSpec(-2, 2).distance(z) > 1e-3
)


def test_small_root_real_axis():
    p = small_root(3.0)
    # |w| < 1 root of w^2 - 3w + 1
    assert p.w == pytest.approx((3 - np.sqrt(5)) / 2, rel=1e-15)
    assert p.sqrt_branch == pytest.approx(np.sqrt(5), rel=1e-14)
    assert small_root(-3.0).w == pytest.approx(-(3 - np.sqrt(5)) / 2, rel=1e-15)


def test_diagonal_entry_closed_form():
    # b_0(z) = (z^2 - 4)^(-1/2) with the branch that behaves like 1/z at infinity
    for z in (2.5, 4.0, 10.0):
        assert resolvent_entry(z, 0) == pytest.approx(1 / np.sqrt(z * z - 4), rel=1e-14)
    assert resolvent_entry(-4.0, 0) == pytest.approx(-1 / np.sqrt(12), rel=1e-14)


@pytest.mark.parametrize("z", [3.0, 2.5 + 0.5j, -1 + 1j, 0.3j])
def test_entries_match_truncated_inverse(z):
    N = 300
    T = build_laplacian(N).matrix
    G = np.linalg.inv(z * np.eye(2 * N + 1) - T)
    c = N
    for k in range(-3, 4):
        assert abs(G[c + k, c] - resolvent_entry(z, k)) < 1e-10


def test_block_is_toeplitz():
    B = resolvent_block(3 + 1j, 4)
    assert B.shape == (4, 4)
    for i in range(4):
        for j in range(4):
            assert B[i, j] == resolvent_entry(3 + 1j, i - j)


def test_band_rejected():
    with pytest.raises(BandProximityError):
        small_root(1.0)
    with pytest.raises(BandProximityError):
        resolvent_norm_bound(2.0 + 1e-12j)


def test_norm_bound_real_axis_tight():
    z = np.linspace(2.01, 10, 100)[1:]
    got = np.array([resolvent_norm_bound(x) for x in z])
    np.testing.assert_allclose(got, 1 / (z - 2), rtol=1e-12)


def test_multiplication_norm():
    assert multiplication_resolvent_norm(-0.5, BandSpec(0, 1)) == pytest.approx(2.0)


@settings(max_examples=200, deadline=None)
@given(z=off_band)
def test_small_root_properties(z):
    w = complex(joukowski_small_root(z))
    assert abs(w) < 1
    assert abs(w + 1 / w - z) < 1e-9 * max(1, abs(z))
    p = small_root(z)
    # the branch term squared recovers z^2 - 4
    assert abs(p.sqrt_branch**2 - (z * z - 4)) < 1e-8 * max(1, abs(z) ** 2)


@settings(max_examples=100, deadline=None)
@given(z=off_band)
def test_norm_bound_dominates_distance(z):
    # ||R(z)|| >= 1/dist(z, spectrum) for the normal operator Delta on l2
    assert resolvent_norm_bound(z) >= (1 - 1e-12) / BandSpec(-2, 2).distance(z)
