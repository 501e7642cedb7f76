"""Weighted eigenvalue sums: disc-zero sums, Lieb-Thirring-type sums, region counts, asymptotics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import LAPLACIAN_BAND, BandSpec
from .spectrum import Spectrum


class ClassificationError(ValueError):
    """An eigenvalue does not belong to the requested asymptotic case."""


def _pos(x: float) -> float:
    return max(x, 0.0)


@dataclass(frozen=True)
class BGKParams:
    """Exponents of the weighted zero sum for functions on the unit disc.

    The weight of a zero ``w`` is
    ``(1-|w|)^(alpha+tau+1) / |w|^(gamma-eps)_+ * prod_j |w - xi_j|^(beta_j-1+tau)_+``.
    """

    alpha: float
    beta: tuple[float, ...] = ()
    xi: tuple[complex, ...] = ()
    gamma: float = 0.0
    C0: float = 0.0
    eps: float | None = None
    tau: float = 0.5

    def __post_init__(self):
        eps = 1.0 - self.tau if self.eps is None else self.eps
        object.__setattr__(self, "eps", float(eps))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "xi", tuple(complex(x) for x in self.xi))
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        if self.gamma < 0 or self.C0 < 0:
            raise ValueError("gamma and C0 must be nonnegative")
        if len(self.beta) != len(self.xi):
            raise ValueError("beta and xi need the same length")
        if any(b < 0 for b in self.beta):
            raise ValueError("beta_j must be nonnegative")
        if any(abs(abs(x) - 1) > 1e-12 for x in self.xi):
            raise ValueError("xi_j must lie on the unit circle")
        for i, a in enumerate(self.xi):
            if any(abs(a - b) < 1e-12 for b in self.xi[i + 1 :]):
                raise ValueError("xi_j must be distinct")

    @classmethod
    def laplacian(cls, tau: float = 0.5, C0: float = 0.0) -> "BGKParams":
        """Exponents for the Laplacian: ``alpha = gamma = 2``, ``beta = (2, 2)`` at ``xi = (1, -1)``."""
        return cls(2.0, (2.0, 2.0), (1.0, -1.0), 2.0, C0, 1.0 - tau, tau)


def bgk_sum(zeros: Sequence[complex], p: BGKParams) -> float:
    w = np.asarray(zeros, dtype=complex).ravel()
    if w.size == 0:
        return 0.0
    aw = np.abs(w)
    if np.any(aw >= 1):
        raise ValueError("zeros must lie in the open unit disc")
    e_w = _pos(p.gamma - p.eps)
    if e_w > 0 and np.any(aw == 0):
        raise ValueError("zero at w = 0 makes the |w| weight singular")
    terms = (1 - aw) ** (p.alpha + p.tau + 1)
    if e_w > 0:
        terms = terms / aw**e_w
    for b, x in zip(p.beta, p.xi):
        terms = terms * np.abs(w - x) ** _pos(b - 1 + p.tau)
    return float(terms.sum())


def _values_and_weights(spec, band):
    if isinstance(spec, Spectrum):
        return (
            np.array([r.value for r in spec.records], dtype=complex),
            np.array([r.multiplicity for r in spec.records], dtype=float),
            spec.band,
        )
    v = np.asarray(spec, dtype=complex).ravel()
    return v, np.ones(v.size), band or LAPLACIAN_BAND


def lieb_thirring_terms(values, band: BandSpec, tau: float) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    return band.distance(v) ** (3 + tau) / (np.abs(v - band.a) * np.abs(v - band.b))


def lieb_thirring_sum(spec, tau: float, band: BandSpec | None = None) -> float:
    """``sum m * dist(l, [a,b])^(3+tau) / (|l - a| |l - b|)`` over the discrete spectrum.

    ``spec`` is a :class:`Spectrum` or a plain sequence of eigenvalues (then
    ``band`` applies, defaulting to ``[-2, 2]``).
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    v, m, band = _values_and_weights(spec, band)
    if v.size == 0:
        return 0.0
    if np.any(band.distance(v) == 0):
        raise ValueError("eigenvalues on the band have no weight")
    return float(np.sum(m * lieb_thirring_terms(v, band, tau)))


REGION_KINDS = ("M-left", "M-right", "N-strip")


@dataclass(frozen=True)
class Region:
    """Counting region next to ``[-2, 2]``; see :meth:`contains`."""

    kind: str
    r: float
    R: float

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ValueError(f"region kind must be one of {REGION_KINDS}")
        if not (0 < self.r < self.R):
            raise ValueError(f"need R > r > 0, got r={self.r}, R={self.R}")

    def contains(self, z: complex) -> bool:
        z = complex(z)
        if self.kind == "M-left":
            return z.real < -2 and self.r < abs(z + 2) < self.R
        if self.kind == "M-right":
            return z.real > 2 and self.r < abs(z - 2) < self.R
        return -2 <= z.real <= 2 and self.r < abs(z.imag) < self.R

    def geometric_factor(self, tau: float) -> float:
        num = self.R * (self.R + 4) if self.kind != "N-strip" else 16 + self.R**2
        return num / self.r ** (3 + tau)


def region_count_bound(spec: Spectrum, region: Region, tau: float) -> tuple[int, float]:
    """Eigenvalues in ``region`` (with multiplicity) and the count bound implied by the weighted sum.

    Inside the region every weight exceeds ``1 / geometric_factor``, so the
    count is at most ``geometric_factor`` times the sum over the members.
    """
    inside = spec.restricted(region.contains)
    count = sum(r.multiplicity for r in inside.records)
    if count == 0:
        return 0, 0.0
    return count, lieb_thirring_sum(inside, tau) * region.geometric_factor(tau)


ASYMPTOTIC_CASES = ("i.a", "ii.a", "iii")


def asymptotics_sums(seq: Sequence[complex], tau: float, case: str) -> float:
    """Case sums for eigenvalues accumulating at a point of ``[-2, 2]``.

    ``i.a``: ``Re l <= -2``, sum ``|l + 2|^(2+tau)``; ``ii.a``: ``Re l > -2``,
    sum ``|Im l|^(3+tau) / |l + 2|``; ``iii``: ``-2 < Re l < 2``, sum ``|Im l|^(3+tau)``.
    """
    if case not in ASYMPTOTIC_CASES:
        raise ValueError(f"case must be one of {ASYMPTOTIC_CASES}")
    v = np.asarray(seq, dtype=complex).ravel()
    if v.size == 0:
        return 0.0
    off = LAPLACIAN_BAND.distance(v) > 0
    if case == "i.a":
        ok = v.real <= -2
    elif case == "ii.a":
        ok = v.real > -2
    else:
        ok = (v.real > -2) & (v.real < 2)
    bad = v[~(ok & off)]
    if bad.size:
        raise ClassificationError(f"entries {bad[:5].tolist()} do not belong to case {case}")
    if case == "i.a":
        return float(np.sum(np.abs(v + 2) ** (2 + tau)))
    if case == "ii.a":
        return float(np.sum(np.abs(v.imag) ** (3 + tau) / np.abs(v + 2)))
    return float(np.sum(np.abs(v.imag) ** (3 + tau)))
