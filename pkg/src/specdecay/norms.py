"""Norms and functionals measured on spectral vector fields.

Every quadratic quantity uses the Plancherel weight (2 pi)^-3 (dxi)^3 so that
``l2_norm_sq`` equals the physical-space integral of |v|^2.  The pseudo-measure
(Y^sigma) and Lei-Lin (X^sigma) quantities act on the Euclidean magnitude of
the coefficient vector and skip the zero mode.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .spectral import VectorField, inverse_transform

__all__ = [
    "NormKind",
    "l2_norm_sq",
    "hs_norm_sq",
    "y_norm",
    "x_norm",
    "low_freq_sup",
    "ball_mass",
    "l1_norm",
    "mode_magnitude",
    "radial_weight_sum",
    "ball_volume_weight",
]


def mode_magnitude(v: VectorField) -> np.ndarray:
    """|v_hat(xi)| over the three components."""
    return np.sqrt(_energy_density(v))


def _energy_density(v: VectorField) -> np.ndarray:
    c = v.coeffs
    return (c.real**2 + c.imag**2).sum(axis=0)


def l2_norm_sq(v: VectorField) -> float:
    return float(v.grid.plancherel * np.sum(_energy_density(v)))


def hs_norm_sq(v: VectorField, s: float) -> float:
    """Homogeneous Sobolev norm squared, weight |xi|^{2s}; zero mode excluded."""
    if s == 0:
        return l2_norm_sq(v)
    w = v.grid.xi_pow(2.0 * s)
    return float(v.grid.plancherel * np.sum(w * _energy_density(v)))


def y_norm(v: VectorField, sigma: float) -> float:
    """max over nonzero modes of |xi|^sigma |v_hat(xi)|."""
    mag = np.sqrt(_energy_density(v))
    w = v.grid.xi_pow(sigma)
    return float(np.max(w * mag))


def x_norm(v: VectorField, sigma: float) -> float:
    """(dxi)^3 sum_{xi != 0} |xi|^sigma |v_hat(xi)|."""
    mag = np.sqrt(_energy_density(v))
    return float(v.grid.cell_volume * np.sum(v.grid.xi_pow(sigma) * mag))


def low_freq_sup(v: VectorField, sigma: float, r: float) -> float:
    """max of |xi|^sigma |v_hat| over nonzero modes with |xi| <= r (0 if none)."""
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    g = v.grid
    inside = g.nonzero & (g.xi_abs <= r)
    if not inside.any():
        return 0.0
    mag = np.sqrt(_energy_density(v))
    return float(np.max((g.xi_pow(sigma) * mag)[inside]))


def ball_mass(v: VectorField, r: float) -> float:
    """Plancherel-weighted sum of |v_hat|^2 over |xi| <= r."""
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    g = v.grid
    inside = g.xi_abs <= r
    return float(g.plancherel * np.sum(_energy_density(v)[inside]))


def l1_norm(v: VectorField) -> float:
    g = v.grid
    phys = np.stack([inverse_transform(c) for c in v.components])
    return float(g.dx**3 * np.sum(np.sqrt(np.sum(np.abs(phys) ** 2, axis=0))))


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf"
_LABEL = re.compile(r"^\s*([A-Za-z0-9]+)\s*(?:\(\s*(.*?)\s*\))?\s*$")

_ARITY = {
    "L2Sq": 0,
    "HsSq": 1,
    "HnegSq": 1,
    "L1": 0,
    "Ysigma": 1,
    "Xsigma": 1,
    "LowFreqSup": 2,
    "BallMass": 1,
}


def _fmt(x: float) -> str:
    return repr(float(x)).removesuffix(".0") if float(x).is_integer() else repr(float(x))


@dataclass(frozen=True)
class NormKind:
    """A named functional: ``tag`` plus its real parameters.

    Labels look like ``L2Sq``, ``HsSq(1)``, ``HnegSq(0.5)``, ``Xsigma(-1)``,
    ``Ysigma(0)``, ``LowFreqSup(0,1)``, ``BallMass(1)``, ``L1``.
    """

    tag: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.tag not in _ARITY:
            raise ValueError(f"unknown norm kind {self.tag!r}")
        if len(self.params) != _ARITY[self.tag]:
            raise ValueError(f"{self.tag} takes {_ARITY[self.tag]} parameter(s), got {len(self.params)}")
        if self.tag in ("Ysigma", "Xsigma") and not -3 <= self.params[0] <= 3:
            raise ValueError(f"{self.tag} exponent must lie in [-3, 3], got {self.params[0]}")
        if self.tag == "HnegSq" and not self.params[0] > 0:
            raise ValueError("HnegSq requires delta > 0")
        if self.tag in ("LowFreqSup", "BallMass") and not self.params[-1] > 0:
            raise ValueError(f"{self.tag} radius must be positive")

    @classmethod
    def parse(cls, label: str) -> "NormKind":
        m = _LABEL.match(label)
        if not m:
            raise ValueError(f"cannot parse norm label {label!r}")
        tag, args = m.group(1), m.group(2)
        params: tuple[float, ...] = ()
        if args:
            parts = [a.strip() for a in args.split(",")]
            for p in parts:
                if not re.fullmatch(_NUM, p):
                    raise ValueError(f"bad parameter {p!r} in {label!r}")
            params = tuple(float(p) for p in parts)
        return cls(tag, params)

    @property
    def label(self) -> str:
        if not self.params:
            return self.tag
        return f"{self.tag}({','.join(_fmt(p) for p in self.params)})"

    def __str__(self):
        return self.label

    def __call__(self, v: VectorField) -> float:
        p = self.params
        match self.tag:
            case "L2Sq":
                return l2_norm_sq(v)
            case "HsSq":
                return hs_norm_sq(v, p[0])
            case "HnegSq":
                return hs_norm_sq(v, -p[0])
            case "L1":
                return l1_norm(v)
            case "Ysigma":
                return y_norm(v, p[0])
            case "Xsigma":
                return x_norm(v, p[0])
            case "LowFreqSup":
                return low_freq_sup(v, p[0], p[1])
            case "BallMass":
                return ball_mass(v, p[0])
        raise AssertionError(self.tag)


def radial_weight_sum(grid, exponent: float, radius: float) -> float:
    """(2 pi)^-3 (dxi)^3 sum over 0 < |xi| <= radius of |xi|^exponent."""
    inside = grid.nonzero & (grid.xi_abs <= radius)
    if not inside.any():
        return 0.0
    return float(grid.plancherel * np.sum(grid.xi_abs[inside] ** exponent))


def ball_volume_weight(exponent: float, radius: float) -> float:
    """Continuum counterpart of :func:`radial_weight_sum` (needs exponent > -3)."""
    return 4.0 * math.pi * radius ** (exponent + 3.0) / (exponent + 3.0) / (2 * math.pi) ** 3
