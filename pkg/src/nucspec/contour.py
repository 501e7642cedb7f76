"""Argument-principle zero counting and Jensen's identity on sampled circles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .determinant import disc_determinant, perturbation_determinant
from .operators import LAPLACIAN_BAND, BandSpec, NuclearOperatorRep

CONTOUR_BAND_GAP = 1e-6
WINDING_RESIDUAL_TOL = 0.01
# Largest phase step between neighbouring nodes that still lets the wrapped
# increments be trusted.
MAX_PHASE_STEP = np.pi / 3


class ContourError(ValueError):
    """The contour is unusable (touches the band, passes a zero, or is too coarse)."""


@dataclass(frozen=True)
class Contour:
    center: complex
    radius: float
    nodes: int = 256

    def __post_init__(self):
        if not self.radius > 0:
            raise ContourError(f"radius must be positive, got {self.radius}")
        if int(self.nodes) != self.nodes or self.nodes < 8:
            raise ContourError(f"need at least 8 nodes, got {self.nodes}")

    def points(self) -> np.ndarray:
        theta = 2 * np.pi * np.arange(self.nodes) / self.nodes
        return self.center + self.radius * np.exp(1j * theta)

    def band_gap(self, band: BandSpec) -> float:
        """Distance from the closed disc to the band; negative when they overlap.

        The determinant has a cut along the band, so only discs clear of it
        give zero counts.
        """
        return float(band.distance(complex(self.center))) - self.radius

    def refined(self, factor: int = 2) -> "Contour":
        return Contour(self.center, self.radius, self.nodes * factor)


@dataclass(frozen=True)
class WindingResult:
    count: int
    raw: float
    residual: float
    max_step: float


def winding_number(values) -> WindingResult:
    """Winding number about 0 of the closed polygon through ``values``."""
    v = np.asarray(values, dtype=complex)
    if np.any(v == 0) or not np.all(np.isfinite(v)):
        raise ContourError("function vanishes or is undefined on the contour")
    steps = np.angle(np.roll(v, -1) / v)
    raw = float(steps.sum() / (2 * np.pi))
    count = int(round(raw))
    return WindingResult(count, raw, abs(raw - count), float(np.abs(steps).max()))


def _det_function(K) -> tuple[Callable[[complex], complex], BandSpec | None]:
    if isinstance(K, NuclearOperatorRep):
        return (lambda z: perturbation_determinant(z, K).value), LAPLACIAN_BAND
    if hasattr(K, "determinant"):
        return K.determinant, K.band
    return K, None


def winding_zero_count(K, contour: Contour, band: BandSpec | None = None) -> WindingResult:
    """Zeros (with order) of the perturbation determinant inside ``contour``.

    ``K`` is a lattice perturbation (Laplacian determinant), an object with
    ``determinant`` and ``band`` attributes, or a plain callable ``d(z)``.
    """
    d, det_band = _det_function(K)
    band = band or det_band
    if band is not None and contour.band_gap(band) <= CONTOUR_BAND_GAP:
        raise ContourError(f"disc of {contour} comes within {CONTOUR_BAND_GAP:g} of the band")
    res = winding_number(np.array([d(z) for z in contour.points()]))
    if res.max_step > MAX_PHASE_STEP or res.residual >= WINDING_RESIDUAL_TOL:
        raise ContourError(
            f"contour too coarse: phase step {res.max_step:.3f} rad, residual {res.residual:.3g} "
            f"with {contour.nodes} nodes; raise the node count"
        )
    return res


def adaptive_winding(K, contour: Contour, band: BandSpec | None = None, max_nodes: int = 1 << 14) -> WindingResult:
    """:func:`winding_zero_count`, doubling the node count until the contour resolves."""
    while True:
        try:
            return winding_zero_count(K, contour, band)
        except ContourError as exc:
            if "too coarse" not in str(exc) or contour.nodes * 2 > max_nodes:
                raise
            contour = contour.refined()


def jensen_sides(h, zeros: Sequence[complex], r: float, nodes: int = 4096) -> tuple[float, float]:
    """Both sides of Jensen's identity on ``|w| = r``.

    Returns ``(sum over zeros |w_k| <= r of log(r/|w_k|), mean of log|h|)``.
    ``h`` is a callable on the disc with ``h(0) = 1`` or an array of samples at
    ``r exp(2 pi i k / nodes)``.
    """
    if not 0 < r < 1:
        raise ValueError(f"radius must lie in (0, 1), got {r}")
    zeros = np.asarray(zeros, dtype=complex).ravel()
    if np.any(np.abs(np.abs(zeros) - r) < 1e-6):
        raise ContourError(f"a zero lies within 1e-6 of |w| = {r}; reposition r")
    if callable(h):
        if abs(abs(complex(h(0.0))) - 1) > 1e-12:
            raise ValueError("Jensen's identity needs |h(0)| = 1")
        w = r * np.exp(2j * np.pi * np.arange(nodes) / nodes)
        samples = np.array([complex(h(x)) for x in w])
    else:
        samples = np.asarray(h, dtype=complex)
    if np.any(samples == 0):
        raise ContourError("h vanishes on the integration circle; reposition r")
    inside = zeros[(np.abs(zeros) <= r) & (zeros != 0)]
    left = float(np.sum(np.log(r / np.abs(inside))))
    right = float(np.mean(np.log(np.abs(samples))))
    return left, right


def jensen_residual(h, zeros: Sequence[complex], r: float, nodes: int = 4096) -> float:
    """``|sum log(r/|w_k|) - (1/2pi) int log|h(r e^{it})| dt|`` with the trapezoid rule."""
    left, right = jensen_sides(h, zeros, r, nodes)
    return abs(left - right)


def lattice_disc_function(K: NuclearOperatorRep) -> Callable[[complex], complex]:
    """``h = d o phi`` for the Laplacian, evaluated without leaving the disc."""
    return lambda w: disc_determinant(w, K).value
