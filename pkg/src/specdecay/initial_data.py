"""Random divergence-free initial data with prescribed low-frequency envelopes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .norms import l2_norm_sq, x_norm, y_norm
from .operators import leray_project
from .spectral import Grid, VectorField

__all__ = [
    "SpectralProfile",
    "CutoffTooLarge",
    "ZeroField",
    "envelope",
    "generate",
    "calibrate_smallness",
    "calibrate_magnetic",
    "measure",
]


class CutoffTooLarge(ValueError):
    pass


class ZeroField(ValueError):
    pass


@dataclass(frozen=True)
class SpectralProfile:
    """Envelope A |xi|^-sigma exp(-|xi|^2 / xi_cut^2) on |xi| >= xi_floor.

    ``xi_floor=None`` means "start at the first lattice shell".
    """

    sigma: float
    amplitude: float
    xi_cut: float
    xi_floor: float | None = None
    seed: int = 0

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise ValueError(f"amplitude must be non-negative, got {self.amplitude}")
        if not self.xi_cut > 0:
            raise ValueError(f"xi_cut must be positive, got {self.xi_cut}")
        if self.xi_floor is not None and self.xi_floor < 0:
            raise ValueError(f"xi_floor must be non-negative, got {self.xi_floor}")


def envelope(profile: SpectralProfile, r) -> np.ndarray:
    """Envelope evaluated at radii ``r`` (zero below the floor and at r = 0)."""
    r = np.asarray(r, dtype=float)
    floor = 0.0 if profile.xi_floor is None else profile.xi_floor
    out = np.zeros_like(r)
    on = (r > 0) & (r >= floor)
    out[on] = profile.amplitude * r[on] ** (-profile.sigma) * np.exp(-(r[on] / profile.xi_cut) ** 2)
    return out


def _unit_field(profile: SpectralProfile, grid: Grid) -> np.ndarray:
    floor = grid.delta_xi if profile.xi_floor is None else max(profile.xi_floor, grid.delta_xi)
    r = grid.xi_abs
    mag = np.zeros(grid.shape)
    on = grid.nonzero & (r >= floor * (1 - 1e-12)) & grid.dealias_mask
    mag[on] = r[on] ** (-profile.sigma) * np.exp(-(r[on] / profile.xi_cut) ** 2)

    rng = np.random.default_rng(np.random.SeedSequence(profile.seed))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(3,) + grid.shape)
    j = grid.conj_index
    # phi(m) - phi(-m) is again uniform and odd under m -> -m, so the field is Hermitian
    phase = phase - phase[:, j][:, :, j][:, :, :, j]
    return (mag / math.sqrt(3.0)) * np.exp(1j * phase)


def generate(profile: SpectralProfile, grid: Grid) -> VectorField:
    """Random-phase field with |v_hat(xi)| = envelope(|xi|) before Leray projection.

    Each component carries magnitude envelope/sqrt(3) with an independent
    uniform phase, then the field is projected onto divergence-free modes.
    Modes outside the dealiasing band and the zero mode are left empty.
    """
    if profile.xi_cut > (2.0 / 3.0) * grid.xi_max_axis * (1 + 1e-12):
        raise CutoffTooLarge(
            f"xi_cut={profile.xi_cut} exceeds (2/3)*|xi|_max={(2 / 3) * grid.xi_max_axis}"
        )
    unit = VectorField(grid, _unit_field(profile, grid))
    out = leray_project(unit)
    return out.with_coeffs(profile.amplitude * out.coeffs, divergence_free=True)


def calibrate_smallness(v: VectorField, target: float) -> VectorField:
    """Rescale ``v`` so that its X^-1 norm equals ``target``."""
    current = x_norm(v, -1.0)
    if current == 0:
        raise ZeroField("cannot calibrate the zero field")
    if target == current:
        return v
    return v * (target / current)


def calibrate_magnetic(b: VectorField, target: float) -> VectorField:
    """Rescale ``b`` so that X^-1(b) + X^0(b) equals ``target``."""
    current = x_norm(b, -1.0) + x_norm(b, 0.0)
    if current == 0:
        raise ZeroField("cannot calibrate the zero field")
    return b * (target / current)


def measure(v: VectorField, sigmas=()) -> dict[str, float]:
    report = {
        "L2Sq": l2_norm_sq(v),
        "Xsigma(-1)": x_norm(v, -1.0),
        "Xsigma(0)": x_norm(v, 0.0),
    }
    for s in sigmas:
        report[f"Ysigma({float(s):g})"] = y_norm(v, s)
    report["divergence_residual"] = v.divergence_residual()
    return report
