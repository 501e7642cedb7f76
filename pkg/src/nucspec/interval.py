"""Multiplication-plus-integral operators on ``C[alpha, beta]``, Nystrom-discretized.

``(Z0 f)(t) = M(t) f(t)`` and ``(K f)(t) = int k(t, s) f(s) ds`` are sampled on
Gauss-Legendre nodes, so ``Z0`` becomes ``diag(M(t_i))`` and ``K`` the weighted
kernel matrix ``k(t_i, s_j) w_j``.

Sign convention: the interval resolvent is taken as ``(M - lam)^{-1}`` and the
determinant as ``d(lam) = det(1 - (M - lam)^{-1} K)``. Its zeros are the
eigenvalues of ``M + coupling * K`` with ``coupling = -1``, which is the default
below; pass ``coupling=+1`` for ``M + K``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .determinant import DetSample, log_abs_regularized_det, regularized_det
from .eigen import eig
from .operators import BandSpec, NuclearOperatorRep, OperatorError
from .resolvent import _check_off_band

DEFAULT_NODES = 64
MIN_NODES = 4
_ENVELOPE_POINTS = 1025


def gauss_legendre(n: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    if n < 1:
        raise OperatorError("quadrature needs at least one node")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (beta - alpha)
    return alpha + half * (x + 1), half * w


def _fine_points(alpha, beta, nodes):
    return np.unique(np.concatenate([nodes, np.linspace(alpha, beta, _ENVELOPE_POINTS)]))


def _check_grid(alpha, beta, n):
    if not alpha < beta:
        raise OperatorError(f"need alpha < beta, got [{alpha}, {beta}]")
    if n < MIN_NODES:
        raise OperatorError(f"need at least {MIN_NODES} nodes, got {n}")


@dataclass(frozen=True)
class MultiplicationModel:
    """Symbol ``M`` sampled on the nodes; ``band = [min M, max M]``.

    For a callable symbol the band is taken over the nodes together with a
    uniform grid including both endpoints, because Gauss nodes omit them.
    """

    alpha: float
    beta: float
    samples: np.ndarray = field(repr=False)
    band: BandSpec
    symbol: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        _check_grid(self.alpha, self.beta, self.samples.shape[0])

    @classmethod
    def from_function(cls, M: Callable, alpha: float = 0.0, beta: float = 1.0, n: int = DEFAULT_NODES):
        t, _ = gauss_legendre(n, alpha, beta)
        samples = np.asarray(M(t), dtype=float) * np.ones_like(t)
        fine = np.asarray(M(_fine_points(alpha, beta, t)), dtype=float)
        return cls(alpha, beta, samples, BandSpec(float(fine.min()), float(fine.max())), M)

    @classmethod
    def from_samples(cls, samples, alpha: float = 0.0, beta: float = 1.0):
        s = np.asarray(samples, dtype=float)
        if not np.all(np.isfinite(s)):
            raise OperatorError("symbol samples must be finite")
        return cls(alpha, beta, s, BandSpec(float(s.min()), float(s.max())))

    @property
    def n(self) -> int:
        return len(self.samples)

    def resampled(self, n: int) -> "MultiplicationModel":
        if self.symbol is None:
            raise OperatorError("tabulated symbols cannot be resampled")
        return MultiplicationModel.from_function(self.symbol, self.alpha, self.beta, n)


@dataclass(frozen=True)
class KernelModel:
    """Kernel ``k(t_i, s_j)`` on the tensor Gauss grid plus quadrature weights.

    ``envelope[j]`` approximates ``max_t |k(t, s_j)|``.
    """

    alpha: float
    beta: float
    values: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    envelope: np.ndarray = field(repr=False)
    kernel: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        _check_grid(self.alpha, self.beta, self.values.shape[0])
        if not np.all(np.isfinite(self.values)):
            raise OperatorError("kernel samples must be finite")

    @classmethod
    def from_function(cls, k: Callable, alpha: float = 0.0, beta: float = 1.0, n: int = DEFAULT_NODES):
        t, w = gauss_legendre(n, alpha, beta)
        values = np.asarray(k(t[:, None], t[None, :]), dtype=complex) * np.ones((n, n))
        fine = _fine_points(alpha, beta, t)
        env = np.abs(np.asarray(k(fine[:, None], t[None, :]), dtype=complex) * np.ones((len(fine), n))).max(axis=0)
        return cls(alpha, beta, values, w, env, k)

    @classmethod
    def from_samples(cls, values, alpha: float = 0.0, beta: float = 1.0):
        values = np.atleast_2d(np.asarray(values, dtype=complex))
        n = values.shape[0]
        if values.shape != (n, n) or n == 0:
            raise OperatorError(f"kernel samples must form a non-empty square table, got {values.shape}")
        _, w = gauss_legendre(n, alpha, beta)
        return cls(alpha, beta, values, w, np.abs(values).max(axis=0))

    @property
    def n(self) -> int:
        return len(self.weights)

    def nystrom(self) -> np.ndarray:
        return self.values * self.weights[None, :]

    def resampled(self, n: int) -> "KernelModel":
        if self.kernel is None:
            raise OperatorError("tabulated kernels cannot be resampled")
        return KernelModel.from_function(self.kernel, self.alpha, self.beta, n)

    def to_rep(self) -> NuclearOperatorRep:
        """Expansion ``K f = sum_j w_j f(s_j) k(., s_j)`` on the node samples."""
        return NuclearOperatorRep(np.diag(self.weights), self.values.T, 0, "interval-continuous")


def kernel_nuclear_norm(K: KernelModel) -> float:
    """Quadrature of ``int max_t |k(t, s)| ds``."""
    if K.n == 0:
        raise OperatorError("empty quadrature grid")
    return float(np.sum(K.weights * K.envelope))


def _check_pair(model: MultiplicationModel, kernel: KernelModel):
    if model.n != kernel.n or model.alpha != kernel.alpha or model.beta != kernel.beta:
        raise OperatorError("symbol and kernel must be sampled on the same node set")
    if model.n < MIN_NODES:
        raise OperatorError(f"at least {MIN_NODES} nodes required, got {model.n}")


def nystrom_matrix(model: MultiplicationModel, kernel: KernelModel, coupling: float = -1.0) -> np.ndarray:
    """``diag(M(t_i)) + coupling * k(t_i, s_j) w_j``."""
    _check_pair(model, kernel)
    return np.diag(model.samples).astype(complex) + coupling * kernel.nystrom()


def interval_determinant(
    lam: complex, model: MultiplicationModel, kernel: KernelModel, coupling: float = -1.0
) -> DetSample:
    """``det(1 - coupling (lam - M)^{-1} K)``; with the default this is ``det(1 - (M - lam)^{-1} K)``."""
    _check_pair(model, kernel)
    lam = complex(lam)
    _check_off_band(lam, model.band)
    a = coupling * kernel.nystrom() / (lam - model.samples)[:, None]
    mu = eig(a)
    return DetSample(lam, regularized_det(mu), log_abs_regularized_det(mu))
