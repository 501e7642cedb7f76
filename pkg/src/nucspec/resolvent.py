"""Exact resolvents of the lattice Laplacian and of multiplication operators.

Every Laplacian quantity is expressed through the small root ``w`` of
``w**2 - z*w + 1 = 0`` (``|w| < 1``). With ``s = 1/w - w`` playing the role of
``sqrt(z**2 - 4)`` the resolvent entries are ``b_k(z) = w**(|k|+1) / (1 - w**2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import LAPLACIAN_BAND, BandSpec

BAND_TOL = 1e-9


class BandProximityError(ValueError):
    """Spectral parameter on, or numerically too close to, the band."""


@dataclass(frozen=True)
class ResolventPoint:
    z: complex
    w: complex
    sqrt_branch: complex


def _check_off_band(z: complex, band: BandSpec = LAPLACIAN_BAND, tol: float = BAND_TOL) -> None:
    if not np.isfinite(z):
        raise BandProximityError(f"spectral parameter must be finite, got {z}")
    d = band.distance(z)
    if d < tol:
        raise BandProximityError(f"z = {z} lies within {d:.3g} of the band [{band.a}, {band.b}]")


def joukowski_small_root(z):
    """Small root of ``w**2 - z*w + 1`` without band checks; vectorized."""
    z = np.asarray(z, dtype=complex)
    # sqrt(z-2)*sqrt(z+2) is analytic off [-2, 2] and ~ z at infinity, so
    # (z + s)/2 is the large root and its reciprocal is the small one.
    s = np.sqrt(z - 2) * np.sqrt(z + 2)
    w = 2.0 / (z + s)
    w = np.where(np.abs(w) >= 1.0, 1.0 / w, w)
    return complex(w) if w.ndim == 0 else w


def small_root(z: complex) -> ResolventPoint:
    """Root of ``w**2 - z*w + 1`` inside the unit disc."""
    z = complex(z)
    _check_off_band(z)
    w = joukowski_small_root(z)
    return ResolventPoint(z, w, 1.0 / w - w)


def entries_from_w(w: complex, k) -> np.ndarray | complex:
    """``b_k`` at ``z = w + 1/w`` written directly in ``w``."""
    k = np.abs(np.asarray(k))
    return w ** (k + 1) / (1.0 - w * w)


def resolvent_entry(z: complex, k):
    """Entry ``b_k(z)`` of ``(z - Delta)^{-1}``; ``k`` may be an array of offsets."""
    return entries_from_w(small_root(z).w, k)


def block_from_w(w: complex, width: int) -> np.ndarray:
    """Toeplitz block ``[b_{i-j}]`` for ``0 <= i, j < width``."""
    k = np.arange(width)
    return entries_from_w(w, k[:, None] - k[None, :])


def resolvent_block(z: complex, width: int) -> np.ndarray:
    return block_from_w(small_root(z).w, width)


def resolvent_norm_bound(z: complex) -> float:
    """Bound on ``||(z - Delta)^{-1}||`` valid on every l^p.

    Equals ``(1/|z^2-4|^{1/2}) (2 + 2|w|) / (2 - 2|w|)``, which is also
    ``sum_k |b_k(z)|``.
    """
    pt = small_root(z)
    aw = abs(pt.w)
    return float((1.0 + aw) / ((1.0 - aw) * abs(pt.sqrt_branch)))


def multiplication_resolvent_norm(lam: complex, band: BandSpec) -> float:
    """``||(lam - M)^{-1}||_inf = 1 / dist(lam, [min M, max M])``.

    ``band`` may be a :class:`BandSpec` or anything with a ``band`` attribute
    (such as a multiplication model).
    """
    band = getattr(band, "band", band)
    _check_off_band(lam, band)
    return 1.0 / band.distance(lam)
