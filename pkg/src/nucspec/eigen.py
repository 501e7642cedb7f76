"""Dense eigenvalue oracle with a canonical ordering."""

from __future__ import annotations

import numpy as np
import scipy.linalg

MAX_DIM = 2048


class EigensolverError(RuntimeError):
    pass


def canonical_order(values) -> np.ndarray:
    """Sort by descending modulus, ties broken by real then imaginary part."""
    v = np.asarray(values, dtype=complex).ravel()
    return v[np.lexsort((v.imag, v.real, -np.abs(v)))]


def eig(a, max_dim: int = MAX_DIM) -> np.ndarray:
    """All eigenvalues of a square matrix, repeated by algebraic multiplicity.

    Uses LAPACK's Hessenberg/QR driver (``zgeev``/``dgeev`` via scipy), which
    is backward stable; exactly Hermitian input goes to the symmetric driver.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got shape {a.shape}")
    if a.shape[0] > max_dim:
        raise ValueError(f"dimension {a.shape[0]} exceeds the cap {max_dim}")
    if a.size == 0:
        return np.zeros(0, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    try:
        if np.array_equal(a, a.conj().T):
            values = scipy.linalg.eigvalsh(a, check_finite=False).astype(complex)
        elif not np.any(a.imag):
            values = scipy.linalg.eigvals(a.real, check_finite=False)
        else:
            values = scipy.linalg.eigvals(a, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"QR iteration did not converge for a {a.shape[0]}x{a.shape[0]} matrix: {exc}") from exc
    return canonical_order(values)
