"""Conformal map from the punctured unit disc onto the complement of a band.

``phi(w) = (b - a)/4 * (w + 1/w + 2) + a``; for ``[-2, 2]`` this is the
Joukowski map ``w + 1/w``. General bands are reduced to ``[-2, 2]`` by the
affine change ``z -> 4 (z - a)/(b - a) - 2``.
"""

from __future__ import annotations

import numpy as np

from .operators import LAPLACIAN_BAND, BandSpec
from .resolvent import BAND_TOL, BandProximityError, joukowski_small_root

SQRT2 = np.sqrt(2.0)


class DiscDomainError(ValueError):
    """Point outside the punctured open unit disc."""


def _check_disc(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    aw = np.abs(w)
    if np.any(aw == 0) or np.any(aw >= 1) or not np.all(np.isfinite(w)):
        raise DiscDomainError("w must satisfy 0 < |w| < 1")
    return w


def _out(x):
    return complex(x) if np.ndim(x) == 0 else x


def phi(w, band: BandSpec = LAPLACIAN_BAND):
    w = _check_disc(w)
    return _out((band.b - band.a) / 4 * (w + 1 / w + 2) + band.a)


def to_standard_band(z, band: BandSpec):
    """Affine image of ``z`` when ``[a, b]`` is moved onto ``[-2, 2]``."""
    return 4 * (np.asarray(z, dtype=complex) - band.a) / (band.b - band.a) - 2


def phi_inverse(z, band: BandSpec = LAPLACIAN_BAND, tol: float = BAND_TOL):
    """The unique ``w`` with ``0 < |w| < 1`` and ``phi(w) = z``."""
    z = np.asarray(z, dtype=complex)
    d = band.distance(z)
    if np.any(np.asarray(d) < tol) or not np.all(np.isfinite(z)):
        raise BandProximityError(f"points within {tol:g} of the band [{band.a}, {band.b}] have no preimage")
    return _out(joukowski_small_root(to_standard_band(z, band)))


def band_distance_bounds(w, band: BandSpec = LAPLACIAN_BAND):
    """Two-sided estimate of ``dist(phi(w), [a, b])``.

    Returns ``(lower, dist, upper)`` with
    ``lower = (b-a)/8 * q`` and ``upper = (b-a)(1+sqrt 2)/8 * q`` where
    ``q = |w^2 - 1| (1 - |w|) / |w|``.
    """
    w = _check_disc(w)
    aw = np.abs(w)
    q = np.abs(w * w - 1) * (1 - aw) / aw
    scale = (band.b - band.a) / 8
    dist = band.distance(phi(w, band))
    lower, upper = scale * q, scale * (1 + SQRT2) * q
    if np.ndim(lower) == 0:
        return float(lower), float(dist), float(upper)
    return lower, dist, upper
