"""Oracle and invariant checks on small grids (8^3 and 16^3).

Each check returns a :class:`CheckResult`; :func:`run_selftest` runs them all.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .analysis import beta_time_integral, heat_sup_bound
from .dynamics import SimState, step_ifrk4
from .initial_data import SpectralProfile, calibrate_smallness, generate
from .norms import l2_norm_sq, x_norm
from .operators import hall_term, hall_term_direct, leray_project
from .spectral import (
    SpectralField,
    VectorField,
    dealias,
    direct_convolution,
    forward_transform,
    inverse_transform,
    make_grid,
    spectral_convolution,
)

__all__ = ["CheckResult", "CHECKS", "run_selftest"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    seconds: float = 0.0
    comparison: str = "<="

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag}  {self.name:<34s} {self.value:.3e} {self.comparison} "
                f"{self.threshold:.3e}  ({self.seconds:.1f}s)")


def _rng(seed):
    return np.random.default_rng(seed)


def _random_real(grid, rng):
    return rng.standard_normal(grid.shape)


def _random_field(grid, rng, sigma=0.0, seed=None):
    seed = int(rng.integers(2**32)) if seed is None else seed
    prof = SpectralProfile(sigma, 1.0, (2 / 3) * grid.xi_max_axis, seed=seed)
    return generate(prof, grid)


def check_fft_roundtrip(tol=1e-12):
    g = make_grid(16, 2 * math.pi)
    f = _random_real(g, _rng(1))
    back = inverse_transform(forward_transform(f, g))
    err = float(np.max(np.abs(back - f)) / np.max(np.abs(f)))
    return "fft round trip", err, tol


def check_convolution(tol=1e-12):
    g = make_grid(8, 2 * math.pi)
    rng = _rng(2)
    fa = dealias(forward_transform(_random_real(g, rng), g))
    fb = dealias(forward_transform(_random_real(g, rng), g))
    fast = spectral_convolution(fa, fb).coeffs
    slow = dealias(SpectralField(g, direct_convolution(fa.coeffs, fb.coeffs, g))).coeffs
    err = float(np.max(np.abs(fast - slow)) / np.max(np.abs(slow)))
    return "convolution vs direct sum (8^3)", err, tol


def check_leray(tol=1e-12):
    g = make_grid(16, 2 * math.pi)
    rng = _rng(3)
    raw = np.stack([forward_transform(_random_real(g, rng), g).coeffs for _ in range(3)])
    v = VectorField(g, raw)
    p = leray_project(v)
    pp = leray_project(p)
    scale = math.sqrt(l2_norm_sq(v))
    idem = math.sqrt(l2_norm_sq(pp - p)) / scale
    q = (v - p).coeffs
    inner = abs(np.sum(np.conj(p.coeffs) * q)) * g.plancherel / scale**2
    div = p.divergence_residual()
    return "leray idempotence/orthogonality", max(idem, inner, div), tol


def check_hall_identity(tol=1e-10):
    g = make_grid(16, 2 * math.pi)
    b = _random_field(g, _rng(4), seed=11)
    a = hall_term(b).coeffs
    d = hall_term_direct(b).coeffs
    err = float(np.linalg.norm(a - d) / np.linalg.norm(a))
    return "hall identity", err, tol


def check_energy_budget(tol=1e-6, t_end=100.0, dt=0.01):
    """Budget residual of an NSE run with visible nonlinear transfer."""
    g = make_grid(16, 16 * math.pi)
    u = generate(SpectralProfile(0.0, 1.0, (2 / 3) * g.xi_max_axis, seed=5), g)
    u = calibrate_smallness(u, 0.2)
    s = SimState.initial(u)
    worst = 0.0
    for _ in range(int(round(t_end / dt))):
        s = step_ifrk4(s, dt)
        worst = max(worst, abs(s.budget_residual()) / s.initial_energy)
    return f"energy budget (t={t_end:g}, dt={dt:g})", worst, tol


def _interp_pairs(rng):
    """(lhs, rhs) for the three Lei-Lin interpolation inequalities on one field."""
    g = make_grid(8, 2 * math.pi)
    v = _random_field(g, rng, sigma=float(rng.uniform(-1, 1)))
    X = lambda s: x_norm(v, s)  # noqa: E731
    s1 = float(rng.uniform(-1, 1))
    s2 = float(rng.uniform(-1, 0))
    k = float(rng.uniform(0.5, 3))
    s3 = float(rng.uniform(0, k))
    return [
        (X(-s1), X(-1) ** ((1 + s1) / 2) * X(1) ** ((1 - s1) / 2)),
        (X(-s2), X(0) ** ((2 + s2) / 2) * X(2) ** (-s2 / 2)),
        (X(s3), X(-1) ** ((k - s3) / (k + 1)) * X(k) ** ((s3 + 1) / (k + 1))),
    ]


def check_interpolation(n_fields=1000, tol=1e-12):
    rng = _rng(6)
    worst = -math.inf
    for _ in range(n_fields):
        for lhs, rhs in _interp_pairs(rng):
            worst = max(worst, lhs / rhs - 1.0)
    return f"interpolation, constant 1 ({n_fields} fields)", max(worst, 0.0), tol


def check_beta(tol=1e-8):
    errs = [
        abs(beta_time_integral(0.5, 0.5, 7.0) - math.pi),
        abs(beta_time_integral(0.75, 0.25, 1.0) - math.pi * math.sqrt(2.0)),
    ]
    quad, _ = integrate.quad(lambda s: (2 - s) ** -0.5 * s**-0.25, 0, 2, epsabs=1e-13, limit=200)
    errs.append(abs(beta_time_integral(0.5, 0.25, 2.0) - quad))
    return "beta time integral", max(errs), tol


def check_heat_sup(n=10_000, tol=1e-10):
    rng = _rng(7)
    worst = -math.inf
    for _ in range(10):
        p, a = float(rng.uniform(0.1, 6)), float(rng.uniform(0.1, 6))
        x = rng.uniform(0, 4 * math.sqrt(p / (2 * a)) + 1, n // 10)
        bound = heat_sup_bound(p, a)
        worst = max(worst, float(np.max(x**p * np.exp(-a * x**2))) / bound - 1.0)
        xs = math.sqrt(p / (2 * a))
        if abs(xs**p * math.exp(-a * xs * xs) - bound) > tol * bound:
            return "heat sup bound", math.inf, tol
    return "heat sup bound", max(worst, 0.0), tol


def observed_order(equation="nse", t_end=4.0, n_coarse=16, levels=3):
    """Richardson estimate log2(|y_h - y_h/2| / |y_h/2 - y_h/4|) from dt-halving.

    The box (L = 8 pi, |xi|^2 <= 4.7 after dealiasing) keeps |xi|^2 dt small
    enough to sit in the asymptotic regime while the nonlinear time scale
    stays comparable to ``t_end``.
    """
    g = make_grid(16, 8 * math.pi)
    u = generate(SpectralProfile(0.0, 1.0, (2 / 3) * g.xi_max_axis, seed=8), g)
    u = u * (1.0 / math.sqrt(l2_norm_sq(u)) * 15.0)
    b = None
    if equation == "hall_mhd":
        b = generate(SpectralProfile(0.0, 1.0, (2 / 3) * g.xi_max_axis, seed=9), g)
        b = b * (1.0 / math.sqrt(l2_norm_sq(b)) * 10.0)
    finals = []
    for lvl in range(levels):
        steps = n_coarse * 2**lvl
        dt = t_end / steps
        s = SimState.initial(u, b)
        for _ in range(steps):
            s = step_ifrk4(s, dt, equation)
        y = s.u.coeffs if b is None else np.concatenate([s.u.coeffs, s.b.coeffs])
        finals.append(y)
    orders = []
    for i in range(levels - 2):
        e1 = np.linalg.norm(finals[i] - finals[i + 1])
        e2 = np.linalg.norm(finals[i + 1] - finals[i + 2])
        orders.append(math.log2(e1 / e2))
    return min(orders)


def check_rk4_order(threshold=3.8):
    order = min(observed_order("nse", levels=4), observed_order("hall_mhd"))
    return "rk4 observed order (nse, hall)", order, threshold, ">="


CHECKS = [
    check_fft_roundtrip,
    check_convolution,
    check_leray,
    check_hall_identity,
    check_interpolation,
    check_beta,
    check_heat_sup,
    check_rk4_order,
    check_energy_budget,
]


def run_selftest(checks=None, echo=None) -> list[CheckResult]:
    results = []
    for fn in checks or CHECKS:
        t0 = time.perf_counter()
        out = fn()
        name, value, thr = out[:3]
        cmp = out[3] if len(out) > 3 else "<="
        ok = value >= thr if cmp == ">=" else value <= thr
        res = CheckResult(name, float(value), float(thr), bool(ok), time.perf_counter() - t0, cmp)
        results.append(res)
        if echo:
            echo(res.line())
    return results
