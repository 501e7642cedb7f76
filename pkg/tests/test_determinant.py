import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nucspec.determinant import (
    DROP_TOL,
    det_lipschitz_gap,
    det_one_minus,
    det_upper_bound_check,
    disc_determinant,
    eigenvalue_sq_sum_check,
    hs_embedding,
    log_abs_regularized_det,
    operator_eigenvalues,
    perturbation_determinant,
    regularized_det,
)
from nucspec.operators import NuclearOperatorRep, WindowOverflowError, build_laplacian, random_rep

seeds = st.integers(0, 2**32 - 1)
spaces = st.sampled_from(["lattice-l1", "lattice-l2", "lattice-linf"])


def _rep(seed, space, rank=4, width=5):
    return random_rep(np.random.default_rng(seed), rank, width, space)


def test_regularized_det_small_cases():
    assert regularized_det([]) == 1.0
    assert regularized_det([0.5]) == pytest.approx(0.5 * np.exp(0.5), rel=1e-15)
    assert regularized_det([1.0, 0.3]) == 0
    assert log_abs_regularized_det([1.0]) == -np.inf
    # tiny eigenvalues are dropped
    assert regularized_det([DROP_TOL / 10]) == 1.0


def test_log_abs_matches_value():
    lam = [0.3 + 0.2j, -1.5, 2.0 - 1j]
    assert log_abs_regularized_det(lam) == pytest.approx(np.log(abs(regularized_det(lam))), rel=1e-13)


def test_rank_one_determinant_at_4():
    # d(z) = (1 - c b0) exp(c b0) with b0(4) = 1/sqrt(12)
    q = 3 / np.sqrt(12)
    expected = (1 - q) * np.exp(q)
    s = perturbation_determinant(4.0, NuclearOperatorRep.rank_one(3.0))
    assert s.value == pytest.approx(expected, rel=1e-13)
    assert s.value.real == pytest.approx(0.318517, abs=1e-6)
    assert s.modulus_log == pytest.approx(np.log(expected), rel=1e-13)


def test_rank_one_zero_at_sqrt13():
    K = NuclearOperatorRep.rank_one(3.0)
    assert abs(perturbation_determinant(np.sqrt(13), K).value) < 1e-14
    # sign change of the real determinant along the real axis
    assert perturbation_determinant(3.5, K).value.real < 0 < perturbation_determinant(3.7, K).value.real


def test_zero_operator():
    K = NuclearOperatorRep.zero()
    assert perturbation_determinant(3 + 1j, K).value == 1
    assert det_one_minus(K) == 1


def test_window_check():
    K = NuclearOperatorRep.diagonal([1, 1, 1], start=-1)
    with pytest.raises(WindowOverflowError):
        perturbation_determinant(3.0, K, N=0)


@pytest.mark.parametrize("z", [3.0, 1 + 1j, -2.5 - 0.2j])
def test_matches_dense_section(z, rng):
    # oracle: regularized determinant of K_N (z - Delta_N)^{-1} with a dense inverse
    K = random_rep(rng, 3, 4, "lattice-l2", start=-2)
    N = 200
    dim = 2 * N + 1
    Kd = np.zeros((dim, dim), dtype=complex)
    lo, hi = K.window
    Kd[N + lo : N + hi + 1, N + lo : N + hi + 1] = K.matrix()
    R = np.linalg.inv(z * np.eye(dim) - build_laplacian(N).matrix)
    lam = np.linalg.eigvals(Kd @ R)
    lam = lam[np.abs(lam) > 1e-12]
    dense = np.prod((1 - lam) * np.exp(lam))
    assert abs(perturbation_determinant(z, K).value - dense) < 1e-9


@pytest.mark.parametrize("N", [5, 10, 50, 400])
def test_independent_of_width(N, rng):
    K = random_rep(rng, 2, 3, "lattice-l2", start=-1)
    ref = perturbation_determinant(2.5 + 0.5j, K).value
    assert abs(perturbation_determinant(2.5 + 0.5j, K, N=N).value - ref) < 1e-12


def test_disc_matches_z():
    K = NuclearOperatorRep.rank_one(2.0)
    w = 0.3 + 0.4j
    assert disc_determinant(w, K).value == pytest.approx(perturbation_determinant(w + 1 / w, K).value, rel=1e-12)
    assert disc_determinant(0, K).value == 1
    with pytest.raises(ValueError):
        disc_determinant(1.2, K)


def test_operator_eigenvalues_diagonal():
    K = NuclearOperatorRep.diagonal([3.0, -1.0, 0.0, 2j])
    np.testing.assert_allclose(sorted(operator_eigenvalues(K), key=abs), [-1.0, 2j, 3.0])


def test_lipschitz_identical():
    K = NuclearOperatorRep.rank_one(0.5)
    assert det_lipschitz_gap(K, K) == (0.0, 0.0)


def test_lipschitz_example():
    A = NuclearOperatorRep.rank_one(0.5)
    B = NuclearOperatorRep.zero()
    gap, bound = det_lipschitz_gap(A, B)
    assert gap == pytest.approx(abs(0.5 * np.exp(0.5) - 1), rel=1e-14)
    assert bound == pytest.approx(0.5 * np.exp(0.5 * 1.5**2), rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, space=spaces)
def test_det_bound(seed, space):
    lhs, rhs = det_upper_bound_check(_rep(seed, space))
    assert lhs <= rhs * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, space=spaces)
def test_eig_square_sum(seed, space):
    lhs, rhs = eigenvalue_sq_sum_check(_rep(seed, space))
    assert lhs <= rhs * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, space=spaces)
def test_lipschitz(seed, space):
    r = np.random.default_rng(seed)
    A = random_rep(r, 3, 4, space, start=0)
    B = random_rep(r, 2, 4, space, start=0)
    gap, bound = det_lipschitz_gap(A, B)
    assert gap <= bound * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, space=spaces)
def test_hs_embedding_spectrum(seed, space):
    K = random_rep(np.random.default_rng(seed), 6, 5, space)
    a = np.sort_complex(np.linalg.eigvals(hs_embedding(K)))
    b = np.linalg.eigvals(K.matrix())
    b = b[np.abs(b) > 1e-10]
    a = a[np.abs(a) > 1e-10]
    assert a.size == b.size
    for x in a:
        assert np.min(np.abs(b - x)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(
    lam=st.lists(
        st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=1, max_size=64
    ),
    seed=seeds,
)
def test_permutation_invariant(lam, seed):
    perm = np.random.default_rng(seed).permutation(len(lam))
    shuffled = np.asarray(lam)[perm]
    la, lb = log_abs_regularized_det(lam), log_abs_regularized_det(shuffled)
    assert la == lb or abs(la - lb) <= 1e-12 * max(1.0, abs(la))
    a, b = regularized_det(lam), regularized_det(shuffled)
    if np.isfinite(a):
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))
