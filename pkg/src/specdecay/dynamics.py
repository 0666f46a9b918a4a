"""Time evolution: exact heat semigroup and integrating-factor RK4.

The viscous/resistive part exp(-|xi|^2 t) is integrated exactly; classical RK4
acts on w = exp(|xi|^2 t) v_hat.  The dissipation integrals 2 int ||grad .||^2
reuse the stage values: |w|^2 is interpolated quadratically through the stages
and integrated against 2|xi|^2 exp(-2|xi|^2 tau) in closed form, which is exact
for the linear flow and reduces to the RK4 (Simpson) weights as |xi|^2 dt -> 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .initial_data import calibrate_magnetic, calibrate_smallness, generate, measure
from .norms import l2_norm_sq
from .operators import half_ops, mhd_rhs_half, nse_rhs_half
from .series import SeriesBundle
from .spectral import Grid, VectorField, full_spectrum, half_spectrum

__all__ = [
    "SimState",
    "IntegratorSpec",
    "RunResult",
    "CFLViolation",
    "heat_step",
    "step_heat",
    "step_ifrk4",
    "initial_fields",
    "run",
    "continue_run",
    "column_names",
]

log = logging.getLogger(__name__)

CFL_NUMBER = 0.5
_ADDITIVE = {"L2Sq", "HsSq", "HnegSq", "Xsigma", "BallMass"}


class CFLViolation(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    u: VectorField
    b: VectorField | None = None
    dissipation_u: float = 0.0
    dissipation_b: float = 0.0
    initial_energy: float = 0.0
    step: int = 0

    @classmethod
    def initial(cls, u: VectorField, b: VectorField | None = None) -> "SimState":
        e0 = l2_norm_sq(u) + (0.0 if b is None else l2_norm_sq(b))
        return cls(0.0, u, b, initial_energy=e0)

    @property
    def grid(self) -> Grid:
        return self.u.grid

    def energy(self) -> float:
        return l2_norm_sq(self.u) + (0.0 if self.b is None else l2_norm_sq(self.b))

    def budget_residual(self) -> float:
        """E(t) + D_u + D_b - E(0); zero for an exact solution."""
        return self.energy() + self.dissipation_u + self.dissipation_b - self.initial_energy


@dataclass(frozen=True)
class IntegratorSpec:
    scheme: str
    dt: float
    t_end: float
    sample_every: int = 1

    def __post_init__(self):
        if self.scheme not in ("HeatOnly", "IFRK4"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")


def heat_step(v: VectorField, dt: float, *, allow_negative: bool = False) -> VectorField:
    """v_hat -> exp(-|xi|^2 dt) v_hat.

    Negative ``dt`` (backward heat flow) is refused unless ``allow_negative``;
    it is only meaningful while |xi|^2 |dt| stays moderate.
    """
    if dt < 0 and not allow_negative:
        raise ValueError(f"heat_step needs dt >= 0, got {dt}")
    if dt == 0:
        return v
    return v.with_coeffs(np.exp(-v.grid.xi_sq * dt) * v.coeffs)


class _Integrator:
    """Per-(grid, dt) cache of integrating factors and dissipation weights."""

    _cache: dict = {}

    def __init__(self, grid: Grid, dt: float):
        ops = half_ops(grid)
        self.grid = grid
        self.ops = ops
        self.dt = dt
        lam = ops.xi_sq
        self.E = np.exp(-lam * dt)
        self.E2 = np.exp(-lam * dt / 2)
        n = grid.n
        mult = np.full(n // 2 + 1, 2.0)
        mult[0] = 1.0
        mult[n // 2] = 1.0
        scale = grid.plancherel * mult
        # |w|^2 at tau = 0, dt/2 (mean of the two midpoint stages), dt
        self.quad_w = [scale * w for w in exp_quadrature_weights(2.0 * lam * dt)]
        self.speed_limit = CFL_NUMBER * grid.dx / dt

    @classmethod
    def get(cls, grid: Grid, dt: float) -> "_Integrator":
        key = (grid.n, grid.box_length, float(dt))
        obj = cls._cache.get(key)
        if obj is None:
            if len(cls._cache) > 16:
                cls._cache.clear()
            obj = cls._cache[key] = cls(grid, dt)
        return obj

    def step_dissipation(self, w0, wa, wb, wc) -> float:
        """2 int_0^dt ||grad v||^2 from integrating-factor stage values."""
        def sq(z):
            return (z.real**2 + z.imag**2).sum(axis=0)

        W0, W1, W2 = self.quad_w
        return float(np.sum(W0 * sq(w0) + W1 * 0.5 * (sq(wa) + sq(wb)) + W2 * sq(wc)))


def exp_quadrature_weights(x: np.ndarray):
    """Weights W0, W1, W2 with int_0^1 x e^{-x s} q(s) ds = W0 q(0) + W1 q(1/2) + W2 q(1)
    for every quadratic q.  Small x uses the moment series to avoid cancellation."""
    x = np.asarray(x, dtype=float)
    small = x < 0.5
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    e = np.exp(-xl)
    mom = [-np.expm1(-xl), (1 - (1 + xl) * e) / xl, (2 - (2 + 2 * xl + xl * xl) * e) / xl**2]
    for k in range(3):
        # int_0^1 x e^{-xs} s^k ds = sum_j (-1)^j x^{j+1} / (j! (j+k+1))
        ser = np.zeros_like(xs)
        term = xs.copy()
        for j in range(24):
            ser += term / (j + k + 1)
            term = -term * xs / (j + 1)
        mom[k] = np.where(small, ser, mom[k])
    m0, m1, m2 = mom
    return 2 * m2 - 3 * m1 + m0, 4 * m1 - 4 * m2, 2 * m2 - m1


def _max_speed(phys: np.ndarray) -> float:
    return float(np.sqrt(np.max(np.sum(phys**2, axis=0))))


def _check_cfl(speed: float, integ: _Integrator, t: float):
    if speed > integ.speed_limit:
        raise CFLViolation(
            f"CFL violated at t={t:g}: max speed {speed:.3e} > 0.5*dx/dt = {integ.speed_limit:.3e}"
        )


def step_heat(state: SimState, dt: float) -> SimState:
    """Exact heat step; the dissipation over the step is (1 - e^{-2|xi|^2 dt}) |v_hat|^2."""
    g = state.grid
    w = -g.plancherel * np.expm1(-2.0 * g.xi_sq * dt)

    def advance(v, d_acc):
        if v is None:
            return None, d_acc
        dens = np.sum(v.coeffs.real**2 + v.coeffs.imag**2, axis=0)
        return heat_step(v, dt), d_acc + float(np.sum(w * dens))

    u, du = advance(state.u, state.dissipation_u)
    b, db = advance(state.b, state.dissipation_b)
    step = state.step + 1
    return replace(state, t=step * dt, u=u, b=b, dissipation_u=du, dissipation_b=db, step=step)


_EQUATION_ALIASES = {"nse": "nse", "NSE": "nse", "hall_mhd": "hall_mhd", "HallMHD": "hall_mhd"}


def step_ifrk4(state: SimState, dt: float, equation: str = "nse") -> SimState:
    """One integrating-factor RK4 step of the NSE or Hall-MHD system.

    The result is re-projected and dealiased.  Raises :class:`CFLViolation`
    if the stage-one velocity (and magnetic field) exceeds 0.5 dx / dt.
    """
    eq = _EQUATION_ALIASES.get(equation)
    if eq is None:
        raise ValueError(f"unknown equation {equation!r}")
    grid = state.grid
    integ = _Integrator.get(grid, dt)
    ops = integ.ops
    E, E2 = integ.E, integ.E2

    if eq == "nse":
        y = half_spectrum(state.u.coeffs)
        ncomp = 3

        def rhs(z, speed=False):
            if speed:
                return nse_rhs_half(z, grid), _max_speed(ops.phys(z))
            return nse_rhs_half(z, grid)
    else:
        b = state.b if state.b is not None else VectorField.zeros(grid)
        y = np.concatenate([half_spectrum(state.u.coeffs), half_spectrum(b.coeffs)])
        ncomp = 6

        def rhs(z, speed=False):
            du, db = mhd_rhs_half(z[:3], z[3:], grid)
            out = np.concatenate([du, db])
            if speed:
                s = max(_max_speed(ops.phys(z[:3])), _max_speed(ops.phys(z[3:])))
                return out, s
            return out

    k1, speed = rhs(y, speed=True)
    _check_cfl(speed, integ, state.t)
    a = E2 * (y + 0.5 * dt * k1)
    k2 = rhs(a)
    bb = E2 * y + 0.5 * dt * k2
    k3 = rhs(bb)
    c = E * y + dt * (E2 * k3)
    k4 = rhs(c)
    y1 = E * y + (dt / 6.0) * (E * k1 + 2.0 * E2 * (k2 + k3) + k4)

    def stage_dissipation(sl):
        # stage values mapped back to the integrating-factor variable
        return integ.step_dissipation(y[sl], a[sl] / E2, bb[sl] / E2, c[sl] / E)

    new_u = ops.project(y1[:3]) * ops.mask
    du_acc = state.dissipation_u + stage_dissipation(slice(0, 3))
    step = state.step + 1
    u = VectorField(grid, full_spectrum(new_u, grid.n), divergence_free=True)
    if ncomp == 3:
        return replace(state, t=step * dt, u=u, dissipation_u=du_acc, step=step)
    new_b = ops.project(y1[3:]) * ops.mask
    db_acc = state.dissipation_b + stage_dissipation(slice(3, 6))
    bf = VectorField(grid, full_spectrum(new_b, grid.n), divergence_free=True)
    return replace(state, t=step * dt, u=u, b=bf, dissipation_u=du_acc,
                   dissipation_b=db_acc, step=step)


def column_names(config) -> list[str]:
    names = [f"u.{k.label}" for k in config.norms]
    if config.equation == "hall_mhd":
        names += [f"b.{k.label}" for k in config.norms]
        names += [f"total.{k.label}" for k in config.norms if k.tag in _ADDITIVE]
    return names


def _sample(state: SimState, config) -> dict[str, float]:
    out = {}
    for k in config.norms:
        vu = k(state.u)
        out[f"u.{k.label}"] = vu
        if config.equation == "hall_mhd":
            vb = k(state.b)
            out[f"b.{k.label}"] = vb
            if k.tag in _ADDITIVE:
                out[f"total.{k.label}"] = vu + vb
    return out


def initial_fields(config) -> tuple[VectorField, VectorField | None]:
    grid = config.grid
    u = generate(config.u_profile, grid)
    b = None
    if config.equation == "hall_mhd":
        b = generate(config.b_profile, grid)
    if config.smallness_target is not None:
        u = calibrate_smallness(u, config.smallness_target)
        if b is not None:
            b = calibrate_magnetic(b, config.smallness_target)
    return u, b


@dataclass
class RunResult:
    config: object
    bundle: SeriesBundle
    state: SimState
    initial_report: dict = field(default_factory=dict)
    budget: list = field(default_factory=list)  # (t, relative residual)
    divergence: list = field(default_factory=list)  # (t, max residual over fields)
    snapshots: list = field(default_factory=list)  # (t, u, b)

    def max_budget_residual(self) -> float:
        return max((abs(r) for _, r in self.budget), default=0.0)


def _advance(state: SimState, config) -> SimState:
    if config.equation == "heat":
        return step_heat(state, config.dt)
    return step_ifrk4(state, config.dt, config.equation)


def run(config, *, keep_snapshots: bool = False, snapshot_every: int | None = None,
        write_outputs: bool = True) -> RunResult:
    """Generate initial data from ``config`` and evolve it to ``t_end``.

    Samples every configured norm every ``sample_every`` steps (and at the
    final step).  With ``output_dir`` set, writes ``series.csv``,
    ``initial_report.json`` and checkpoints.
    """
    u, b = initial_fields(config)
    state = SimState.initial(u, b)
    report = {"u": measure(u, [config.u_profile.sigma])}
    if b is not None:
        report["b"] = measure(b, [config.b_profile.sigma])
    return continue_run(config, state, keep_snapshots=keep_snapshots,
                        snapshot_every=snapshot_every, write_outputs=write_outputs,
                        initial_report=report)


def continue_run(config, state: SimState, *, keep_snapshots=False, snapshot_every=None,
                 write_outputs=True, initial_report=None) -> RunResult:
    """Evolve ``state`` (possibly loaded from a checkpoint) to ``config.t_end``."""
    from . import io as _io

    if state.grid != config.grid:
        raise ValueError(f"state grid {state.grid} does not match config grid {config.grid}")
    if config.equation == "hall_mhd" and state.b is None:
        raise ValueError("hall_mhd run needs a magnetic field in the state")
    n_steps = config.n_steps
    every = config.sample_every
    snap_every = snapshot_every or every
    result = RunResult(config, SeriesBundle(column_names(config)), state,
                       initial_report=initial_report or {})
    e0 = state.initial_energy if state.initial_energy > 0 else 1.0

    integ = _Integrator.get(config.grid, config.dt) if config.equation != "heat" else None

    def record(s: SimState):
        if s.step % every == 0 or s.step == n_steps:
            if integ is not None:
                speed = _max_speed(s.u.to_physical())
                if s.b is not None:
                    speed = max(speed, _max_speed(s.b.to_physical()))
                _check_cfl(speed, integ, s.t)
            result.bundle.append(s.t, _sample(s, config))
            result.budget.append((s.t, s.budget_residual() / e0))
            div = s.u.divergence_residual()
            if s.b is not None:
                div = max(div, s.b.divergence_residual())
            result.divergence.append((s.t, div))
        if keep_snapshots and (s.step % snap_every == 0 or s.step == n_steps):
            result.snapshots.append((s.t, s.u, s.b))

    out_dir = config.output_dir if write_outputs else None
    record(state)
    while state.step < n_steps:
        state = _advance(state, config)
        record(state)
        if out_dir and config.checkpoint_every and state.step % config.checkpoint_every == 0:
            _io.save_checkpoint(state, _io.checkpoint_path(out_dir, state.step))
    result.state = state
    log.info("run finished at t=%g after %d steps", state.t, state.step)

    if out_dir:
        _io.write_run_outputs(result, out_dir)
    return result
