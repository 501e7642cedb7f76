"""Unperturbed model operators and finite-rank nuclear perturbations.

A perturbation is stored as a finite sum of rank-one terms
``K f = sum_n <phi_n, f> f_n`` on a window of lattice indices. The nuclear
norm reported here is the upper bound given by the stored representation,
``sum_n ||phi_n||_* ||f_n||``, with the dual norm picked by the space tag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

SPACES = ("lattice-l1", "lattice-l2", "lattice-linf", "interval-continuous")

# (dual exponent for functionals, exponent for vectors). Functionals on sampled
# continuous functions are point-mass combinations, so they behave like l^1.
_EXPONENTS = {
    "lattice-l1": (np.inf, 1),
    "lattice-l2": (2, 2),
    "lattice-linf": (1, np.inf),
    "interval-continuous": (1, np.inf),
}


class OperatorError(ValueError):
    """Invalid operator data or an incompatible window."""


class WindowOverflowError(OperatorError):
    """A perturbation is supported outside the truncation window."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BandSpec:
    """Essential spectrum ``[a, b]`` of the unperturbed operator."""

    a: float = -2.0
    b: float = 2.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.a < self.b):
            raise OperatorError(f"band needs a < b, got [{self.a}, {self.b}]")

    def distance(self, z):
        """Distance from ``z`` (scalar or array) to the segment ``[a, b]``."""
        z = np.asarray(z, dtype=complex)
        x = np.clip(z.real, self.a, self.b)
        d = np.hypot(z.real - x, z.imag)
        return float(d) if d.ndim == 0 else d


LAPLACIAN_BAND = BandSpec(-2.0, 2.0)


@dataclass(frozen=True)
class NuclearOperatorRep:
    """Finite rank-one expansion ``K = sum_n phi_n (x) f_n``.

    ``functionals[n]`` and ``vectors[n]`` hold the coefficients of
    ``phi_n`` and ``f_n`` on the index window ``start .. start + width - 1``.
    The pairing ``<phi, f> = sum_k phi[k] f[k]`` is bilinear.
    """

    functionals: np.ndarray
    vectors: np.ndarray
    start: int = 0
    space: str = "lattice-l2"

    def __post_init__(self):
        if self.space not in SPACES:
            raise OperatorError(f"unsupported space tag {self.space!r}; expected one of {SPACES}")
        phi = np.atleast_2d(np.asarray(self.functionals, dtype=complex))
        vec = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if phi.size == 0 or vec.size == 0:
            width = max(phi.shape[-1], vec.shape[-1]) if phi.ndim == 2 else 0
            phi = np.zeros((0, width), dtype=complex)
            vec = np.zeros((0, width), dtype=complex)
        if phi.shape != vec.shape:
            raise OperatorError(f"functional/vector shapes differ: {phi.shape} vs {vec.shape}")
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(vec))):
            raise OperatorError("coefficients must be finite")
        object.__setattr__(self, "functionals", _frozen(phi))
        object.__setattr__(self, "vectors", _frozen(vec))
        object.__setattr__(self, "start", int(self.start))

    @classmethod
    def zero(cls, space: str = "lattice-l2", start: int = 0, width: int = 1) -> "NuclearOperatorRep":
        return cls(np.zeros((0, width)), np.zeros((0, width)), start, space)

    @classmethod
    def from_terms(
        cls,
        terms: Iterable[tuple[Mapping[int, complex], Mapping[int, complex]]],
        space: str = "lattice-l2",
        window: tuple[int, int] | None = None,
    ) -> "NuclearOperatorRep":
        """Build from sparse ``(functional, vector)`` index->value maps.

        ``window`` is an inclusive index range; when omitted the smallest
        window covering every listed index is used.
        """
        terms = [(dict(p), dict(f)) for p, f in terms]
        indices = [k for p, f in terms for k in (*p, *f)]
        if window is None:
            window = (min(indices), max(indices)) if indices else (0, 0)
        lo, hi = int(window[0]), int(window[1])
        if hi < lo:
            raise OperatorError(f"empty window {window}")
        bad = [k for k in indices if not lo <= k <= hi]
        if bad:
            raise WindowOverflowError(f"indices {sorted(set(bad))} outside window [{lo}, {hi}]")
        width = hi - lo + 1
        phi = np.zeros((len(terms), width), dtype=complex)
        vec = np.zeros((len(terms), width), dtype=complex)
        for n, (p, f) in enumerate(terms):
            for k, v in p.items():
                phi[n, k - lo] += v
            for k, v in f.items():
                vec[n, k - lo] += v
        return cls(phi, vec, lo, space)

    @classmethod
    def rank_one(cls, c: complex, index: int = 0, space: str = "lattice-l2") -> "NuclearOperatorRep":
        """``c * e_index (x) e_index``: a point potential of strength ``c``."""
        return cls.from_terms([({index: c}, {index: 1.0})], space)

    @classmethod
    def diagonal(cls, d: Sequence[complex], start: int = 0, space: str = "lattice-l2") -> "NuclearOperatorRep":
        d = np.asarray(d, dtype=complex)
        eye = np.eye(len(d), dtype=complex)
        keep = d != 0
        return cls((eye * d[:, None])[keep], eye[keep], start, space)

    @classmethod
    def from_matrix(cls, a, start: int = 0, space: str = "lattice-l2") -> "NuclearOperatorRep":
        """Rank-one expansion of a dense matrix suited to the space tag.

        l^1 uses rows (so the bound is the row-maximum sum), l^inf and the
        interval space use columns, and l^2 uses the singular value
        decomposition (so the bound is the trace norm).
        """
        a = np.atleast_2d(np.asarray(a, dtype=complex))
        if a.shape[0] != a.shape[1]:
            raise OperatorError(f"square matrix required, got {a.shape}")
        n = a.shape[0]
        eye = np.eye(n, dtype=complex)
        if space == "lattice-l1":
            phi, vec = a, eye
        elif space in ("lattice-linf", "interval-continuous"):
            phi, vec = eye, a.T
        elif space == "lattice-l2":
            u, s, vh = np.linalg.svd(a)
            keep = s > 0
            phi = (s[:, None] * vh)[keep]
            vec = u.T[keep]
        else:
            raise OperatorError(f"unsupported space tag {space!r}")
        nonzero = np.any(phi != 0, axis=1) & np.any(vec != 0, axis=1)
        return cls(phi[nonzero], vec[nonzero], start, space)

    @property
    def rank(self) -> int:
        return self.functionals.shape[0]

    @property
    def width(self) -> int:
        return self.functionals.shape[1]

    @property
    def window(self) -> tuple[int, int]:
        return self.start, self.start + self.width - 1

    def matrix(self) -> np.ndarray:
        """Dense matrix on the window: ``K[i, j] = sum_n f_n[i] phi_n[j]``."""
        return self.vectors.T @ self.functionals

    def scaled(self, s: complex) -> "NuclearOperatorRep":
        return NuclearOperatorRep(self.functionals * s, self.vectors, self.start, self.space)

    def widened(self, window: tuple[int, int]) -> "NuclearOperatorRep":
        """The same operator written on a larger window."""
        lo, hi = window
        if lo > self.start or hi < self.window[1]:
            raise WindowOverflowError(f"window {self.window} does not fit in {window}")
        pad = ((0, 0), (self.start - lo, hi - self.window[1]))
        return NuclearOperatorRep(np.pad(self.functionals, pad), np.pad(self.vectors, pad), lo, self.space)

    def concat(self, other: "NuclearOperatorRep") -> "NuclearOperatorRep":
        """Representation of ``self + other`` by joining the term lists."""
        if other.space != self.space:
            raise OperatorError(f"space mismatch: {self.space} vs {other.space}")
        window = (min(self.start, other.start), max(self.window[1], other.window[1]))
        a, b = self.widened(window), other.widened(window)
        return NuclearOperatorRep(
            np.vstack([a.functionals, b.functionals]),
            np.vstack([a.vectors, b.vectors]),
            window[0],
            self.space,
        )

    def without_zero_terms(self) -> "NuclearOperatorRep":
        keep = np.any(self.functionals != 0, axis=1) & np.any(self.vectors != 0, axis=1)
        return NuclearOperatorRep(self.functionals[keep], self.vectors[keep], self.start, self.space)


def term_norms(K: NuclearOperatorRep) -> tuple[np.ndarray, np.ndarray]:
    """Dual norms of the functionals and norms of the vectors, per term."""
    q, p = _EXPONENTS[K.space]
    if K.rank == 0:
        return np.zeros(0), np.zeros(0)
    return (
        np.linalg.norm(K.functionals, ord=q, axis=1),
        np.linalg.norm(K.vectors, ord=p, axis=1),
    )


def nuclear_norm_bound(K: NuclearOperatorRep) -> float:
    """Upper bound ``sum_n ||phi_n||_* ||f_n||`` on the nuclear norm."""
    dual, primal = term_norms(K)
    return float(np.sum(dual * primal))


def l1_matrix_nuclear_norm(a) -> float:
    """Nuclear norm of a matrix acting on l^1: sum over rows of the row maximum."""
    a = np.atleast_2d(np.asarray(a))
    if a.size == 0:
        return 0.0
    return float(np.abs(a).max(axis=1).sum())


def matrix_nuclear_norm_bound(a, space: str) -> float:
    """Nuclear norm bound of a dense matrix via :meth:`NuclearOperatorRep.from_matrix`."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.size == 0:
        return 0.0
    if space == "lattice-l1":
        return l1_matrix_nuclear_norm(a)
    if space in ("lattice-linf", "interval-continuous"):
        return float(np.abs(a).max(axis=0).sum())
    if space == "lattice-l2":
        return float(np.linalg.svd(a, compute_uv=False).sum())
    raise OperatorError(f"unsupported space tag {space!r}")


@dataclass(frozen=True)
class Truncation:
    """Finite section on lattice indices ``-N .. N``."""

    half_width: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (2 * self.half_width + 1,) * 2:
            raise OperatorError(f"matrix shape {m.shape} does not match half-width {self.half_width}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return 2 * self.half_width + 1


def build_laplacian(N: int) -> Truncation:
    """Finite section of ``(Delta f)(n) = f(n-1) + f(n+1)``."""
    if int(N) != N or N < 1:
        raise OperatorError(f"half-width must be a positive integer, got {N}")
    N = int(N)
    off = np.ones(2 * N)
    return Truncation(N, np.diag(off, 1) + np.diag(off, -1))


def check_window(K: NuclearOperatorRep, N: int) -> None:
    if K.rank and (K.start < -N or K.window[1] > N):
        raise WindowOverflowError(f"support {K.window} exceeds truncation window [{-N}, {N}]")


def assemble_perturbed(Z0: Truncation, K: NuclearOperatorRep) -> Truncation:
    """Dense ``Z0 + K`` with ``K`` placed at its lattice indices."""
    N = Z0.half_width
    check_window(K, N)
    z = np.array(Z0.matrix)
    if K.rank:
        i = K.start + N
        z[i : i + K.width, i : i + K.width] += K.matrix()
    return Truncation(N, z)


def random_rep(
    rng: np.random.Generator,
    rank: int,
    width: int,
    space: str = "lattice-l2",
    start: int | None = None,
    radius: float = 1.0,
) -> NuclearOperatorRep:
    """Random terms with coefficients drawn uniformly from the disc of ``radius``."""

    def disc(shape):
        r = radius * np.sqrt(rng.uniform(size=shape))
        return r * np.exp(2j * np.pi * rng.uniform(size=shape))

    if start is None:
        start = -(width // 2)
    return NuclearOperatorRep(disc((rank, width)), disc((rank, width)), start, space)
