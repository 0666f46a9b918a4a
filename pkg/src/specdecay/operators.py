"""Fourier-space projection, curl and the nonlinear right-hand sides.

The public functions take and return :class:`VectorField`.  The ``*_half``
kernels work on rfftn-layout half spectra of shape (3, n, n, n//2+1) and are
what the time stepper calls; they skip the full-array bookkeeping.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as sfft

from .spectral import (
    Grid,
    GridMismatch,
    VectorField,
    full_spectrum,
    half_spectrum,
)

__all__ = [
    "leray_project",
    "curl",
    "divergence",
    "nse_nonlinear",
    "mhd_rhs",
    "hall_term",
    "hall_term_direct",
    "nse_rhs_half",
    "mhd_rhs_half",
    "project_half",
]

# symmetric tensor index pairs (i, j) with i <= j, and lookup for T_ij
_PAIRS = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
_SYM = [[0, 1, 2], [1, 3, 4], [2, 4, 5]]


class _HalfOps:
    """Multipliers on the rfftn half lattice for one grid."""

    def __init__(self, grid: Grid):
        n = grid.n
        self.grid = grid
        self.n = n
        self.xi = np.ascontiguousarray(grid.xi[..., : n // 2 + 1])
        xi_sq = np.sum(self.xi**2, axis=0)
        self.xi_sq = xi_sq
        self.inv_xi_sq = np.where(xi_sq > 0, 1.0 / np.where(xi_sq > 0, xi_sq, 1.0), 0.0)
        self.mask = np.ascontiguousarray(grid.dealias_mask[..., : n // 2 + 1])
        self.to_phys = grid.dx ** -3.0
        self.to_spec = grid.dx**3

    def phys(self, h: np.ndarray) -> np.ndarray:
        n = self.n
        return sfft.irfftn(h, s=(n, n, n), axes=(-3, -2, -1), workers=-1) * self.to_phys

    def spec(self, p: np.ndarray) -> np.ndarray:
        return sfft.rfftn(p, axes=(-3, -2, -1), workers=-1) * (self.to_spec * self.mask)

    def project(self, v: np.ndarray) -> np.ndarray:
        xi = self.xi
        dot = xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]
        dot *= self.inv_xi_sq
        return v - xi * dot

    def div_tensor(self, t6: np.ndarray) -> np.ndarray:
        """i xi_j T_ij for a symmetric tensor given by its 6 independent entries."""
        xi = self.xi
        out = np.empty((3,) + t6.shape[1:], dtype=complex)
        for i in range(3):
            s = _SYM[i]
            out[i] = 1j * (xi[0] * t6[s[0]] + xi[1] * t6[s[1]] + xi[2] * t6[s[2]])
        return out

    def curl(self, v: np.ndarray) -> np.ndarray:
        xi = self.xi
        return 1j * np.stack([
            xi[1] * v[2] - xi[2] * v[1],
            xi[2] * v[0] - xi[0] * v[2],
            xi[0] * v[1] - xi[1] * v[0],
        ])


_OPS_CACHE: dict[tuple[int, float], _HalfOps] = {}


def half_ops(grid: Grid) -> _HalfOps:
    key = (grid.n, grid.box_length)
    ops = _OPS_CACHE.get(key)
    if ops is None:
        ops = _OPS_CACHE[key] = _HalfOps(grid)
    return ops


def _outer6(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.stack([a[i] * b[j] for i, j in _PAIRS])


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.stack([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def project_half(vh: np.ndarray, grid: Grid) -> np.ndarray:
    return half_ops(grid).project(vh)


def nse_rhs_half(uh: np.ndarray, grid: Grid) -> np.ndarray:
    """-P i xi . (u (x) u)^ on half spectra."""
    ops = half_ops(grid)
    u = ops.phys(uh)
    t = ops.spec(_outer6(u, u))
    return -ops.project(ops.div_tensor(t))


def mhd_rhs_half(uh: np.ndarray, bh: np.ndarray, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    ops = half_ops(grid)
    u = ops.phys(uh)
    b = ops.phys(bh)
    bb = _outer6(b, b)
    prods = np.concatenate([_outer6(u, u) - bb, bb, _cross(u, b)])
    s = ops.spec(prods)
    du = -ops.project(ops.div_tensor(s[:6]))
    db = ops.curl(s[12:]) - ops.curl(ops.div_tensor(s[6:12]))
    return du, db


def _wrap_half(h: np.ndarray, grid: Grid, divergence_free=True) -> VectorField:
    return VectorField(grid, full_spectrum(h, grid.n), divergence_free=divergence_free)


def _check(a: VectorField, b: VectorField):
    if a.grid != b.grid:
        raise GridMismatch(f"grid mismatch: {a.grid} vs {b.grid}")


def leray_project(v: VectorField) -> VectorField:
    """Apply m_ij(xi) = delta_ij - xi_i xi_j / |xi|^2; identity on the zero mode."""
    g = v.grid
    xi = g.xi
    dot = np.einsum("i...,i...->...", xi, v.coeffs)
    inv = np.where(g.xi_sq > 0, 1.0 / np.where(g.xi_sq > 0, g.xi_sq, 1.0), 0.0)
    return v.with_coeffs(v.coeffs - xi * (dot * inv), divergence_free=True)


def curl(v: VectorField) -> VectorField:
    xi = v.grid.xi
    c = v.coeffs
    out = 1j * np.stack([
        xi[1] * c[2] - xi[2] * c[1],
        xi[2] * c[0] - xi[0] * c[2],
        xi[0] * c[1] - xi[1] * c[0],
    ])
    return v.with_coeffs(out, divergence_free=True)


def divergence(v: VectorField) -> np.ndarray:
    return 1j * np.einsum("i...,i...->...", v.grid.xi, v.coeffs)


def nse_nonlinear(u: VectorField) -> VectorField:
    uh = half_spectrum(u.coeffs)
    return _wrap_half(nse_rhs_half(uh, u.grid), u.grid)


def mhd_rhs(u: VectorField, b: VectorField) -> tuple[VectorField, VectorField]:
    """Nonlinear Hall-MHD tendencies (du, dB), viscous/resistive parts excluded."""
    _check(u, b)
    du, db = mhd_rhs_half(half_spectrum(u.coeffs), half_spectrum(b.coeffs), u.grid)
    return _wrap_half(du, u.grid), _wrap_half(db, u.grid)


def hall_term(b: VectorField) -> VectorField:
    """i xi x (i xi . (B (x) B)^), the conservative form of curl((curl B) x B)."""
    ops = half_ops(b.grid)
    bp = ops.phys(half_spectrum(b.coeffs))
    h = ops.curl(ops.div_tensor(ops.spec(_outer6(bp, bp))))
    return _wrap_half(h, b.grid)


def hall_term_direct(b: VectorField) -> VectorField:
    """i xi x ((curl B) x B)^, computed through the current J = curl B."""
    ops = half_ops(b.grid)
    bh = half_spectrum(b.coeffs)
    j = ops.phys(ops.curl(bh))
    bp = ops.phys(bh)
    h = ops.curl(ops.spec(_cross(j, bp)))
    return _wrap_half(h, b.grid)
