import numpy as np
import pytest

from nucspec.determinant import perturbation_determinant
from nucspec.eigen import EigensolverError, canonical_order, eig
from nucspec.operators import NuclearOperatorRep, WindowOverflowError, build_laplacian
from nucspec.resolvent import small_root
from nucspec.spectrum import cluster, discrete_spectrum, laplacian_spectrum, stable_zero_check


@pytest.mark.parametrize("c", [1.0, 3.0, -2.0, 1 + 1j, -0.5 + 2j])
def test_rank_one_closed_form(c):
    # secular equation c b0(z) = 1, i.e. sqrt(z^2 - 4) = c on the branch ~ z at infinity
    spec = laplacian_spectrum(NuclearOperatorRep.rank_one(c), 100)
    assert len(spec) == 1
    roots = [s * np.sqrt(4 + c * c + 0j) for s in (1, -1)]
    expected = [z for z in roots if abs(small_root(z).sqrt_branch - c) < 1e-9]
    assert len(expected) == 1
    expected = expected[0]
    rec = spec.records[0]
    assert abs(rec.value - expected) < 1e-9
    assert rec.multiplicity == 1 and rec.stable


def test_zero_operator_empty():
    spec = laplacian_spectrum(NuclearOperatorRep.zero(), 20)
    assert len(spec) == 0 and spec.values().size == 0


def test_weak_potential_eigenvalue_near_band():
    # c = 0.2: eigenvalue at distance ~0.01 from the band is excluded by delta
    spec = laplacian_spectrum(NuclearOperatorRep.rank_one(0.2), 100, delta=0.05)
    assert len(spec) == 0
    spec = laplacian_spectrum(NuclearOperatorRep.rank_one(0.2), 200, delta=0.005)
    assert len(spec) == 1
    assert spec.records[0].value == pytest.approx(np.sqrt(4.04), abs=1e-9)


def test_purely_imaginary_coupling_has_no_eigenvalue():
    # sqrt(z^2 - 4) = 1.5i only on the band itself
    assert len(laplacian_spectrum(NuclearOperatorRep.rank_one(1.5j), 100)) == 0


def test_validation():
    with pytest.raises(ValueError):
        laplacian_spectrum(NuclearOperatorRep.rank_one(1.0), 20, delta=0.0)
    with pytest.raises(WindowOverflowError):
        laplacian_spectrum(NuclearOperatorRep.diagonal([1] * 5, start=-2), 1)
    with pytest.raises(ValueError):
        discrete_spectrum("heat", NuclearOperatorRep.zero())


def test_dispatch():
    spec = discrete_spectrum("laplacian", NuclearOperatorRep.rank_one(3.0), N=100)
    assert spec.records[0].value == pytest.approx(np.sqrt(13), abs=1e-9)


def test_zeros_match_determinant():
    K = NuclearOperatorRep.diagonal([3.0, -2.0 + 1j, 2.5j], start=-1)
    spec = laplacian_spectrum(K, 150)
    assert len(spec) >= 2
    for v, m, wc in stable_zero_check(spec, lambda z: perturbation_determinant(z, K).value):
        assert m == wc
        assert abs(perturbation_determinant(v, K).value) < 1e-8


def test_laplacian_with_double_eigenvalue_sites_far_apart():
    # two equal point potentials far apart: nearly degenerate pair
    d = np.zeros(41)
    d[0] = d[40] = 3.0
    K = NuclearOperatorRep.diagonal(d, start=-20)
    spec = laplacian_spectrum(K, 100)
    vals = spec.values()
    assert vals.size == 2
    np.testing.assert_allclose(vals, np.sqrt(13), atol=1e-9)


def test_cluster():
    out = cluster([1.0, 1.0 + 1e-10, 2.0, -3.0])
    assert out[0] == (-3.0, 1)
    assert (pytest.approx(1.0), 2) in [(c, m) for c, m in out]


def test_eig_paths():
    h = np.array([[2.0, 1j], [-1j, 2.0]])
    np.testing.assert_allclose(sorted(eig(h).real), [1.0, 3.0])
    r = np.array([[0.0, 1.0], [-1.0, 0.0]])
    np.testing.assert_allclose(sorted(eig(r).imag), [-1.0, 1.0])
    with pytest.raises(ValueError):
        eig(np.ones((3, 2)))
    with pytest.raises(ValueError, match="cap"):
        eig(np.eye(5), max_dim=4)
    with pytest.raises(ValueError):
        eig(np.array([[np.nan]]))
    assert issubclass(EigensolverError, RuntimeError)


def test_canonical_order_deterministic():
    v = np.array([1j, -1j, 2.0, -2.0])
    a = canonical_order(v)
    b = canonical_order(v[::-1])
    np.testing.assert_array_equal(a, b)


def test_eig_examples():
    np.testing.assert_allclose(sorted(eig(build_laplacian(1).matrix).real), [-np.sqrt(2), 0, np.sqrt(2)], atol=1e-14)
    np.testing.assert_allclose(sorted(eig(np.diag([3.0, -1.0, 2.0])).real), [-1, 2, 3])
    np.testing.assert_allclose(eig(np.array([[2.0, 1.0], [0.0, 2.0]])), [2, 2])
