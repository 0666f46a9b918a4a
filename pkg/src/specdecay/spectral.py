"""Discrete wavenumber lattice, transforms and dealiased products.

Conventions
-----------
A field on the periodic box [0, L)^3 sampled at x = (L/n) * index has
coefficients

    c(m) = (L/n)^3 * sum_x f(x) exp(-i xi_m . x),     xi_m = (2 pi / L) m,

which is the Riemann-sum discretisation of f_hat(xi) = int f(x) e^{-i xi.x} dx.
The inverse is f(x) = (2 pi)^-3 (dxi)^3 sum_m c(m) exp(i xi_m . x).

Coefficient arrays are stored in full n x n x n form in numpy FFT order
(0, 1, ..., n/2-1, -n/2, ..., -1 on every axis).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "SpectralField",
    "VectorField",
    "GridMismatch",
    "OddResolution",
    "ResolutionTooSmall",
    "InvalidBoxLength",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "spectral_convolution",
    "dealias",
    "direct_convolution",
    "half_spectrum",
    "full_spectrum",
]


class OddResolution(ValueError):
    pass


class ResolutionTooSmall(ValueError):
    pass


class InvalidBoxLength(ValueError):
    pass


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Grid:
    """Cubic periodic lattice with ``n`` modes per axis and side ``box_length``."""

    n: int
    box_length: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.n == other.n and self.box_length == other.box_length

    def __hash__(self):
        return hash((self.n, self.box_length))

    @property
    def delta_xi(self) -> float:
        return 2.0 * np.pi / self.box_length

    @property
    def dx(self) -> float:
        return self.box_length / self.n

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def xi_min(self) -> float:
        return self.delta_xi

    @property
    def xi_max_axis(self) -> float:
        """Largest |xi_j| per axis, (n/2) * delta_xi."""
        return 0.5 * self.n * self.delta_xi

    @cached_property
    def mode_index(self) -> np.ndarray:
        """Integer mode numbers along one axis in FFT order."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    @cached_property
    def xi(self) -> np.ndarray:
        """Wavevector components, shape (3, n, n, n)."""
        k = self.delta_xi * self.mode_index.astype(float)
        return np.stack(np.meshgrid(k, k, k, indexing="ij"))

    @cached_property
    def xi_sq(self) -> np.ndarray:
        return np.sum(self.xi**2, axis=0)

    @cached_property
    def xi_abs(self) -> np.ndarray:
        return np.sqrt(self.xi_sq)

    @cached_property
    def nonzero(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        mask[0, 0, 0] = False
        return mask

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        m = np.abs(self.mode_index)
        keep = 3 * m < self.n
        return keep[:, None, None] & keep[None, :, None] & keep[None, None, :]

    @cached_property
    def conj_index(self) -> np.ndarray:
        """Index map m -> -m along one axis."""
        return (-np.arange(self.n)) % self.n

    def xi_pow(self, s: float) -> np.ndarray:
        """|xi|^s on nonzero modes, 0 at the origin. Cached per exponent."""
        key = ("xi_pow", float(s))
        if key not in self._cache:
            w = np.zeros(self.shape)
            w[self.nonzero] = self.xi_abs[self.nonzero] ** s
            self._cache[key] = w
        return self._cache[key]

    def wavenumber(self, m) -> np.ndarray:
        """Wavevector of integer mode triple ``m`` (entries in [-n/2, n/2-1])."""
        m = np.asarray(m, dtype=float)
        if np.any(m < -self.n // 2) or np.any(m > self.n // 2 - 1):
            raise IndexError(f"mode {m} outside lattice of size {self.n}")
        return self.delta_xi * m

    def index_of(self, m) -> tuple[int, int, int]:
        return tuple(int(mj) % self.n for mj in m)

    def physical_points(self) -> np.ndarray:
        x = self.dx * np.arange(self.n)
        return np.stack(np.meshgrid(x, x, x, indexing="ij"))

    # Plancherel weight: (2 pi)^-3 (dxi)^3 = L^-3
    @property
    def plancherel(self) -> float:
        return self.box_length ** -3.0

    @property
    def cell_volume(self) -> float:
        """(dxi)^3, the Riemann-sum weight in frequency space."""
        return self.delta_xi**3


def make_grid(n: int, box_length: float) -> Grid:
    """Validated lattice; instances are shared so cached multipliers are reused."""
    if int(n) != n:
        raise OddResolution(f"resolution must be an integer, got {n}")
    n = int(n)
    if n % 2:
        raise OddResolution(f"resolution must be even, got {n}")
    if n < 8:
        raise ResolutionTooSmall(f"resolution must be >= 8, got {n}")
    if not box_length > 0 or not np.isfinite(box_length):
        raise InvalidBoxLength(f"box_length must be positive, got {box_length}")
    return _shared_grid(n, float(box_length))


@lru_cache(maxsize=32)
def _shared_grid(n: int, box_length: float) -> Grid:
    return Grid(n, box_length)


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: Grid
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(f"coeffs shape {self.coeffs.shape} != {self.grid.shape}")

    def hermitian_defect(self) -> float:
        return _hermitian_defect(self.coeffs, self.grid)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Three spectral components on a shared grid; ``coeffs`` has shape (3, n, n, n)."""

    grid: Grid
    coeffs: np.ndarray
    divergence_free: bool = False
    real: bool = True

    def __post_init__(self):
        if self.coeffs.shape != (3,) + self.grid.shape:
            raise ValueError(f"coeffs shape {self.coeffs.shape} != (3,)+{self.grid.shape}")

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid, np.zeros((3,) + grid.shape, dtype=complex), divergence_free=True)

    @classmethod
    def from_components(cls, comps, divergence_free=False) -> "VectorField":
        grids = {c.grid for c in comps}
        if len(grids) != 1:
            raise GridMismatch("components live on different grids")
        grid = comps[0].grid
        return cls(grid, np.stack([c.coeffs for c in comps]), divergence_free,
                   all(c.real for c in comps))

    @property
    def components(self) -> tuple[SpectralField, SpectralField, SpectralField]:
        return tuple(SpectralField(self.grid, self.coeffs[j], self.real) for j in range(3))

    def with_coeffs(self, coeffs, divergence_free=None) -> "VectorField":
        df = self.divergence_free if divergence_free is None else divergence_free
        return VectorField(self.grid, coeffs, df, self.real)

    def __add__(self, other: "VectorField") -> "VectorField":
        _check_same_grid(self.grid, other.grid)
        return VectorField(self.grid, self.coeffs + other.coeffs,
                           self.divergence_free and other.divergence_free,
                           self.real and other.real)

    def __sub__(self, other: "VectorField") -> "VectorField":
        _check_same_grid(self.grid, other.grid)
        return VectorField(self.grid, self.coeffs - other.coeffs,
                           self.divergence_free and other.divergence_free,
                           self.real and other.real)

    def __mul__(self, c: float) -> "VectorField":
        return VectorField(self.grid, c * self.coeffs, self.divergence_free,
                           self.real and np.isrealobj(c))

    __rmul__ = __mul__

    def divergence_residual(self) -> float:
        """max |xi . v_hat| / max |xi| |v_hat|; 0 for the zero field."""
        div = np.abs(np.einsum("i...,i...->...", self.grid.xi, self.coeffs))
        scale = np.max(self.grid.xi_abs * np.sqrt(np.sum(np.abs(self.coeffs) ** 2, axis=0)))
        if scale == 0:
            return 0.0
        return float(np.max(div) / scale)

    def hermitian_defect(self) -> float:
        return max(_hermitian_defect(c, self.grid) for c in self.coeffs)

    def to_physical(self) -> np.ndarray:
        return np.stack([inverse_transform(c) for c in self.components])

    @classmethod
    def from_physical(cls, grid: Grid, arr, divergence_free=False) -> "VectorField":
        arr = np.asarray(arr)
        return cls(grid, np.stack([forward_transform(a, grid).coeffs for a in arr]),
                   divergence_free, np.isrealobj(arr))


def _check_same_grid(a: Grid, b: Grid):
    if a != b:
        raise GridMismatch(f"grid mismatch: {a} vs {b}")


def _hermitian_defect(c: np.ndarray, grid: Grid) -> float:
    j = grid.conj_index
    mirrored = np.conj(c[np.ix_(j, j, j)])
    scale = np.max(np.abs(c))
    return 0.0 if scale == 0 else float(np.max(np.abs(c - mirrored)) / scale)


def half_spectrum(c: np.ndarray) -> np.ndarray:
    """Last-axis half of a Hermitian coefficient array (rfftn layout)."""
    n = c.shape[-1]
    return c[..., : n // 2 + 1]


def full_spectrum(h: np.ndarray, n: int) -> np.ndarray:
    """Rebuild the full array from an rfftn-layout half spectrum by conjugate symmetry."""
    out = np.empty(h.shape[:-1] + (n,), dtype=complex)
    out[..., : n // 2 + 1] = h
    j = (-np.arange(n)) % n
    # the k3 = 0 and k3 = n/2 planes must be Hermitian on their own
    for k in (0, n // 2):
        plane = h[..., k]
        out[..., k] = 0.5 * (plane + np.conj(plane[..., j, :][..., j]))
    tail = np.arange(n // 2 + 1, n)
    src = out[..., j, :, :][..., j, :][..., (n - tail)]
    out[..., n // 2 + 1:] = np.conj(src)
    return out


def forward_transform(samples, grid: Grid) -> SpectralField:
    """Physical samples of shape (n, n, n) -> spectral coefficients."""
    f = np.asarray(samples)
    if f.shape != grid.shape:
        raise ValueError(f"samples shape {f.shape} != grid shape {grid.shape}")
    w = grid.dx**3
    if np.isrealobj(f):
        h = sfft.rfftn(f, workers=-1) * w
        return SpectralField(grid, full_spectrum(h, grid.n), True)
    return SpectralField(grid, sfft.fftn(f, workers=-1) * w, False)


def inverse_transform(f: SpectralField) -> np.ndarray:
    w = f.grid.dx ** -3.0
    n = f.grid.n
    if f.real:
        return sfft.irfftn(half_spectrum(f.coeffs), s=(n, n, n), workers=-1) * w
    return sfft.ifftn(f.coeffs, workers=-1) * w


def dealias(f):
    """Zero every mode with 3|m_j| >= n on any axis. Accepts scalar or vector fields."""
    mask = f.grid.dealias_mask
    if isinstance(f, VectorField):
        return f.with_coeffs(f.coeffs * mask)
    return SpectralField(f.grid, f.coeffs * mask, f.real)


def spectral_convolution(f: SpectralField, g: SpectralField) -> SpectralField:
    """Transform of the pointwise product f*g, dealiased."""
    _check_same_grid(f.grid, g.grid)
    prod = inverse_transform(f) * inverse_transform(g)
    return dealias(forward_transform(prod, f.grid))


def direct_convolution(a: np.ndarray, b: np.ndarray, grid: Grid) -> np.ndarray:
    """Cyclic lattice convolution L^-3 * sum_p a(m - p) b(p), by explicit summation.

    O(n^6); intended as an oracle on small grids.
    """
    n = grid.n
    out = np.zeros(grid.shape, dtype=complex)
    idx = np.arange(n)
    for p in np.ndindex(n, n, n):
        bp = b[p]
        if bp == 0:
            continue
        shifted = a[np.ix_((idx - p[0]) % n, (idx - p[1]) % n, (idx - p[2]) % n)]
        out += shifted * bp
    return out * grid.plancherel
