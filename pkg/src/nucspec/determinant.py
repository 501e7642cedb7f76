"""Regularized determinants of finite-rank operators and the perturbation determinant.

``det(1 - K) = prod_n (1 - lambda_n) exp(lambda_n)`` over the eigenvalues of
``K``. For a finite expansion ``K = sum_n phi_n (x) f_n`` the nonzero
eigenvalues are those of the Gram-type matrix ``G[i, j] = <phi_i, f_j>``, so
everything reduces to ``rank x rank`` linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import canonical_order, eig
from .operators import (
    NuclearOperatorRep,
    OperatorError,
    check_window,
    matrix_nuclear_norm_bound,
    nuclear_norm_bound,
    term_norms,
)
from .resolvent import block_from_w, small_root

DROP_TOL = 1e-14


@dataclass(frozen=True)
class DetSample:
    z: complex
    value: complex
    modulus_log: float


def _significant(eigs) -> np.ndarray:
    v = canonical_order(eigs)
    return v[np.abs(v) >= DROP_TOL]


def regularized_det(eigs) -> complex:
    """``prod (1 - l) exp(l)``, multiplied in canonical order."""
    out = 1.0 + 0j
    for lam in _significant(eigs):
        out *= (1.0 - lam) * np.exp(lam)
    return complex(out)


def log_abs_regularized_det(eigs) -> float:
    """``log|det|`` as ``sum log|1 - l| + Re l``; ``-inf`` at an exact zero."""
    v = _significant(eigs)
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(np.abs(1.0 - v)) + v.real))


def gram_matrix(K: NuclearOperatorRep) -> np.ndarray:
    """``G[i, j] = <phi_i, f_j>``; its spectrum is the nonzero spectrum of ``K``."""
    return K.functionals @ K.vectors.T


def operator_eigenvalues(K: NuclearOperatorRep) -> np.ndarray:
    """Nonzero eigenvalues of ``K`` (with multiplicity), canonical order."""
    if K.rank == 0:
        return np.zeros(0, dtype=complex)
    return _significant(eig(gram_matrix(K)))


def det_one_minus(K: NuclearOperatorRep) -> complex:
    return regularized_det(operator_eigenvalues(K))


def compressed_kr(K: NuclearOperatorRep, w: complex) -> np.ndarray:
    """``<phi_i, R(z) f_j>`` with ``z = w + 1/w`` and the exact lattice resolvent.

    ``K R(z)`` has the same nonzero spectrum as this ``rank x rank`` matrix,
    and only resolvent entries between sites of the window enter.
    """
    b = block_from_w(w, K.width)
    return K.functionals @ b @ K.vectors.T


def _sample_from_w(z: complex, K: NuclearOperatorRep, w: complex) -> DetSample:
    if K.rank == 0:
        return DetSample(z, 1.0 + 0j, 0.0)
    lam = eig(compressed_kr(K, w))
    return DetSample(z, regularized_det(lam), log_abs_regularized_det(lam))


def perturbation_determinant(z: complex, K: NuclearOperatorRep, N: int | None = None) -> DetSample:
    """``d(z) = det(1 - K (z - Delta)^{-1})`` for the lattice Laplacian.

    ``N`` is the truncation half-width the caller works with; it is only used
    to check that ``K`` fits the window, since the compressed evaluation does
    not depend on it.
    """
    if N is not None:
        check_window(K, N)
    pt = small_root(z)
    return _sample_from_w(pt.z, K, pt.w)


def disc_determinant(w: complex, K: NuclearOperatorRep) -> DetSample:
    """``h(w) = d(w + 1/w)`` evaluated directly from ``w`` (``h(0) = 1``)."""
    w = complex(w)
    if w == 0:
        return DetSample(complex("inf"), 1.0 + 0j, 0.0)
    if abs(w) >= 1:
        raise ValueError("w must lie in the open unit disc")
    return _sample_from_w(w + 1 / w, K, w)


def det_upper_bound_check(K: NuclearOperatorRep) -> tuple[float, float]:
    """``(|det(1 - K)|, exp(||K||_N^2 / 2))``; the first never exceeds the second."""
    return abs(det_one_minus(K)), float(np.exp(0.5 * nuclear_norm_bound(K) ** 2))


def hs_embedding(K: NuclearOperatorRep) -> np.ndarray:
    """Balanced matrix ``a_ij = sqrt(|f_i|/|phi_i|) <phi_i, f_j> sqrt(|phi_j|/|f_j|)``.

    It is a diagonal similarity transform of :func:`gram_matrix`, hence has the
    nonzero spectrum of ``K``.
    """
    K = K.without_zero_terms()
    if K.rank == 0:
        return np.zeros((0, 0), dtype=complex)
    dual, primal = term_norms(K)
    if np.any(dual == 0) or np.any(primal == 0) or not np.all(np.isfinite(dual * primal)):
        raise OperatorError("representation has a term with zero or non-finite norm")
    d = np.sqrt(primal / dual)
    return d[:, None] * gram_matrix(K) / d[None, :]


def difference_norm_bound(A: NuclearOperatorRep, B: NuclearOperatorRep) -> float:
    """Nuclear norm bound of ``A - B``: the better of the dense-matrix and joined-term bounds."""
    diff = A.concat(B.scaled(-1.0))
    return min(nuclear_norm_bound(diff), matrix_nuclear_norm_bound(diff.matrix(), diff.space))


def det_lipschitz_gap(A: NuclearOperatorRep, B: NuclearOperatorRep) -> tuple[float, float]:
    """``|det(1-A) - det(1-B)|`` and ``||A-B|| exp((||A|| + ||B|| + 1)^2 / 2)``."""
    gap = abs(det_one_minus(A) - det_one_minus(B))
    na, nb = nuclear_norm_bound(A), nuclear_norm_bound(B)
    dn = difference_norm_bound(A, B)
    with np.errstate(over="ignore"):
        bound = dn * np.exp(0.5 * (na + nb + 1) ** 2) if dn > 0 else 0.0
    return float(gap), float(bound)


def eigenvalue_sq_sum_check(K: NuclearOperatorRep) -> tuple[float, float]:
    """``(sum |lambda_n(K)|^2, ||K||_N^2)``."""
    lam = operator_eigenvalues(K)
    return float(np.sum(np.abs(lam) ** 2)), nuclear_norm_bound(K) ** 2
