"""Discrete eigenvalues of perturbed finite sections.

Finite sections put spurious eigenvalues next to the band. A value is kept if
it is farther than ``delta`` from the band and survives doubling the
truncation (it moves by less than ``stability_tol``). Multiplicity comes from
clustering and is then confirmed by the winding number of the perturbation
determinant around the cluster.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .contour import Contour, ContourError, adaptive_winding
from .determinant import perturbation_determinant
from .eigen import MAX_DIM, canonical_order, eig
from .interval import (
    DEFAULT_NODES,
    KernelModel,
    MultiplicationModel,
    interval_determinant,
    nystrom_matrix,
)
from .operators import LAPLACIAN_BAND, BandSpec, NuclearOperatorRep, assemble_perturbed, build_laplacian, check_window

log = logging.getLogger(__name__)

DEFAULT_DELTA = 0.05
STABILITY_TOL = 1e-6
CLUSTER_RADIUS = 1e-8


@dataclass(frozen=True)
class EigenRecord:
    value: complex
    multiplicity: int
    band_distance: float
    stable: bool


@dataclass(frozen=True)
class Spectrum:
    records: tuple[EigenRecord, ...]
    band: BandSpec
    width: int
    delta: float = DEFAULT_DELTA
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def values(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity."""
        return np.array([r.value for r in self.records for _ in range(r.multiplicity)], dtype=complex)

    def restricted(self, keep: Callable[[complex], bool]) -> "Spectrum":
        return Spectrum(tuple(r for r in self.records if keep(r.value)), self.band, self.width, self.delta, self.meta)


@dataclass(frozen=True)
class IntervalProblem:
    """Multiplication operator plus integral kernel, ready for determinant evaluation."""

    model: MultiplicationModel
    kernel: KernelModel
    coupling: float = -1.0

    @property
    def band(self) -> BandSpec:
        return self.model.band

    def determinant(self, z: complex) -> complex:
        return interval_determinant(z, self.model, self.kernel, self.coupling).value

    def matrix(self) -> np.ndarray:
        return nystrom_matrix(self.model, self.kernel, self.coupling)

    def resampled(self, n: int) -> "IntervalProblem":
        return IntervalProblem(self.model.resampled(n), self.kernel.resampled(n), self.coupling)

    @property
    def can_resample(self) -> bool:
        return self.model.symbol is not None and self.kernel.kernel is not None


def cluster(values, radius: float = CLUSTER_RADIUS) -> list[tuple[complex, int]]:
    """Single-linkage groups of points closer than ``radius``: ``(mean, size)``."""
    v = canonical_order(values)
    n = len(v)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(v[i] - v[j]) < radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(v[i])
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    return sorted(out, key=lambda cm: (-abs(cm[0]), cm[0].real, cm[0].imag))


def _candidates(values, band: BandSpec, delta: float) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    return values[band.distance(values) > delta]


def _moved(value: complex, reference: np.ndarray) -> float:
    if reference.size == 0:
        return np.inf
    return float(np.min(np.abs(reference - value)))


def _confirm_radius(center: complex, others: list[complex], band: BandSpec) -> float:
    r = min(1e-3 * max(1.0, abs(center)), 0.5 * band.distance(center))
    gaps = [abs(center - o) for o in others if o != center]
    if gaps:
        r = min(r, 0.4 * min(gaps))
    return r


def _build(
    coarse: np.ndarray,
    fine: np.ndarray | None,
    band: BandSpec,
    width: int,
    delta: float,
    stability_tol: float,
    require_stable: bool,
    det: Callable[[complex], complex] | None,
    meta: dict,
) -> Spectrum:
    groups = cluster(_candidates(coarse, band, delta))
    fine_c = None if fine is None else _candidates(fine, band, 0.5 * delta)
    centers = [c for c, _ in groups]
    records = []
    for center, count in groups:
        stable = fine_c is not None and _moved(center, fine_c) < stability_tol
        if require_stable and fine_c is not None and not stable:
            log.debug("dropping unstable eigenvalue %s", center)
            continue
        mult = count
        if det is not None:
            try:
                res = adaptive_winding(det, Contour(center, _confirm_radius(center, centers, band), 64), band)
                if res.count != count:
                    log.info("winding count %d overrides cluster size %d at %s", res.count, count, center)
                mult = res.count
            except ContourError as exc:
                log.warning("multiplicity at %s not confirmed: %s", center, exc)
        if mult < 1:
            # no zero of the determinant here: a truncation artefact
            continue
        records.append(EigenRecord(center, mult, float(band.distance(center)), bool(stable)))
    return Spectrum(tuple(records), band, width, delta, meta)


def laplacian_spectrum(
    K: NuclearOperatorRep,
    N: int,
    delta: float = DEFAULT_DELTA,
    stability_tol: float = STABILITY_TOL,
    require_stable: bool = True,
    confirm: bool = True,
    max_dim: int = MAX_DIM,
) -> Spectrum:
    """Discrete spectrum of ``Delta + K`` from the sections of half-width ``N`` and ``2N``."""
    if not delta > 0:
        raise ValueError(f"exclusion radius must be positive, got {delta}")
    check_window(K, N)
    meta = {"N": N, "delta": delta, "scenario": "laplacian"}
    if K.rank == 0:
        return Spectrum((), LAPLACIAN_BAND, N, delta, meta)
    coarse = eig(assemble_perturbed(build_laplacian(N), K).matrix, max_dim)
    fine = eig(assemble_perturbed(build_laplacian(2 * N), K).matrix, max_dim)
    det = (lambda z: perturbation_determinant(z, K).value) if confirm else None
    return _build(coarse, fine, LAPLACIAN_BAND, N, delta, stability_tol, require_stable, det, meta)


def interval_spectrum(
    problem: IntervalProblem,
    delta: float = DEFAULT_DELTA,
    stability_tol: float = STABILITY_TOL,
    require_stable: bool = True,
    confirm: bool = True,
) -> Spectrum:
    """Discrete spectrum of the Nystrom matrix; stability is judged against twice the nodes."""
    if not delta > 0:
        raise ValueError(f"exclusion radius must be positive, got {delta}")
    n = problem.model.n
    coarse = eig(problem.matrix())
    fine = eig(problem.resampled(2 * n).matrix()) if problem.can_resample else None
    det = problem.determinant if confirm else None
    meta = {"nodes": n, "delta": delta, "scenario": "interval", "coupling": problem.coupling}
    return _build(coarse, fine, problem.band, n, delta, stability_tol, require_stable, det, meta)


def discrete_spectrum(kind: str, K, N: int = DEFAULT_NODES, delta: float = DEFAULT_DELTA, **kwargs) -> Spectrum:
    """Dispatch on the unperturbed operator: ``"laplacian"`` or ``"multiplication"``."""
    if kind == "laplacian":
        return laplacian_spectrum(K, N, delta, **kwargs)
    if kind == "multiplication":
        if not isinstance(K, IntervalProblem):
            raise TypeError("multiplication spectra need an IntervalProblem")
        if K.model.n != N and K.can_resample:
            K = K.resampled(N)
        return interval_spectrum(K, delta, **kwargs)
    raise ValueError(f"unknown operator kind {kind!r}")


def stable_zero_check(spec: Spectrum, det: Callable[[complex], complex]) -> list[tuple[complex, int, int]]:
    """``(value, multiplicity, winding count)`` for every record of ``spec``."""
    centers = [r.value for r in spec.records]
    out = []
    for r in spec.records:
        res = adaptive_winding(det, Contour(r.value, _confirm_radius(r.value, centers, spec.band), 64), spec.band)
        out.append((r.value, r.multiplicity, res.count))
    return out
