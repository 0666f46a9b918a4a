"""Turning sampled norm series into decay verdicts.

Decay exponents are least-squares slopes of log(value) against log(1+t).
The remaining functions are diagnostics for the Fourier-splitting argument,
closed-form special-function identities and a continuum heat-flow oracle that
does not touch the lattice at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .norms import NormKind, ball_mass, hs_norm_sq, l2_norm_sq, radial_weight_sum, y_norm
from .series import NormSeries, SeriesBundle

__all__ = [
    "DecayFit",
    "InsufficientSamples",
    "NonPositiveValues",
    "fit_decay_exponent",
    "local_slopes",
    "heat_decay_oracle",
    "heat_oracle_slope",
    "SplittingReport",
    "splitting_check",
    "SplittingXReport",
    "splitting_check_x",
    "beta_time_integral",
    "heat_sup_bound",
    "HnegReport",
    "hneg_split",
    "hneg_interp_bound",
    "hneg_continuum_constant",
]

MIN_FIT_SAMPLES = 8


class InsufficientSamples(ValueError):
    pass


class NonPositiveValues(ValueError):
    pass


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    stderr: float
    window: tuple[float, float]
    r_squared: float
    log_constant: float
    n_samples: int

    @property
    def constant(self) -> float:
        return math.exp(self.log_constant)

    def within(self, target: float, tol: float) -> bool:
        return abs(self.exponent - target) <= tol


def _loglog_fit(x: np.ndarray, y: np.ndarray):
    """Slope, intercept, slope stderr and r^2 of an ordinary least-squares line."""
    A = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + icpt)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    n = x.size
    sxx = float(((x - x.mean()) ** 2).sum())
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 and sxx > 0 else math.inf
    if ss_tot <= 1e-30 * max(1.0, float(y @ y)):
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return float(slope), float(icpt), stderr, r2


def fit_decay_exponent(series: NormSeries, t_lo: float, t_hi: float) -> DecayFit:
    """Fit value(t) ~ C (1+t)^p on the samples with t_lo <= t <= t_hi."""
    if not t_hi > t_lo:
        raise ValueError(f"empty window [{t_lo}, {t_hi}]")
    sel = (series.t >= t_lo) & (series.t <= t_hi)
    count = int(sel.sum())
    if count < MIN_FIT_SAMPLES:
        raise InsufficientSamples(
            f"{series.name}: {count} samples in [{t_lo}, {t_hi}], need {MIN_FIT_SAMPLES}"
        )
    w = series.window(t_lo, t_hi)
    if np.any(w.values <= 0):
        raise NonPositiveValues(f"{series.name}: non-positive values in [{t_lo}, {t_hi}]")
    slope, icpt, se, r2 = _loglog_fit(np.log1p(w.t), np.log(w.values))
    return DecayFit(slope, se, (float(t_lo), float(t_hi)), r2, icpt, len(w.t))


def local_slopes(series: NormSeries) -> np.ndarray:
    """d log(value) / d log(1+t) between consecutive samples."""
    return np.diff(np.log(series.values)) / np.diff(np.log1p(series.t))


# ---------------------------------------------------------------- heat oracle


def heat_decay_oracle(sigma: float, profile=None, t: float = 0.0) -> float:
    """||e^{t Laplacian} u0||^2 for random-phase data with a radial envelope.

    Evaluates (2/3) (2 pi)^-3 4 pi int e^{-2 t r^2} E(r)^2 r^2 dr, the expected
    energy after Leray projection of a field whose modes have magnitude E(r).
    ``profile`` supplies amplitude, cutoff and floor; ``None`` means the pure
    power law r^-sigma (unit amplitude, no cutoff, no floor).
    """
    if sigma >= 1.5:
        raise ValueError(f"sigma must be < 3/2 for a finite energy, got {sigma}")
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    amp, cut, floor = 1.0, math.inf, 0.0
    if profile is not None:
        amp, cut = profile.amplitude, profile.xi_cut
        floor = profile.xi_floor or 0.0
    if t == 0 and not math.isfinite(cut):
        raise ValueError("pure power-law data has infinite energy at t = 0")

    def f(r):
        g = r ** (2.0 - 2.0 * sigma) * math.exp(-2.0 * t * r * r)
        if math.isfinite(cut):
            g *= math.exp(-2.0 * (r / cut) ** 2)
        return g

    # the integrand lives on the scale min(1/sqrt(t), cut); split there
    scale = min(1.0 / math.sqrt(t) if t > 0 else math.inf, cut)
    pts = [floor, floor + scale, floor + 10 * scale, math.inf]
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
    return (2.0 / 3.0) * amp**2 * 4.0 * math.pi / (2.0 * math.pi) ** 3 * total


def heat_oracle_slope(sigma: float, profile=None, t_lo: float = 10.0, t_hi: float = 1e3,
                      n_points: int = 41) -> float:
    """Log-log slope of :func:`heat_decay_oracle` against log t (log-spaced t)."""
    ts = np.geomspace(t_lo, t_hi, n_points)
    vals = np.array([heat_decay_oracle(sigma, profile, float(t)) for t in ts])
    slope, *_ = _loglog_fit(np.log(ts), np.log(vals))
    return slope


# ------------------------------------------------------- splitting diagnostics


@dataclass
class SplittingReport:
    N: float
    sigma: float
    t: np.ndarray
    lhs: np.ndarray  # per pair
    rhs: np.ndarray
    tolerance: np.ndarray
    integrand: np.ndarray  # per snapshot
    max_violation: float
    fitted_exponent: float  # of the integrand, against log(1+t)
    constant: float  # C in integrand <= C (1+t)^{N - 5/2 + sigma}

    @property
    def violations(self) -> int:
        return int(np.sum(self.lhs - self.rhs > self.tolerance))

    @property
    def reconstructed_exponent(self) -> float:
        """Decay exponent of ||f||^2 implied by integrating the fitted right side."""
        return self.fitted_exponent + 1.0 - self.N

    @property
    def ok(self) -> bool:
        return self.violations == 0


def splitting_check(snapshots, N: float, sigma: float, *, rtol: float = 1e-12) -> SplittingReport:
    """Integrated weighted-energy inequality between consecutive snapshots.

    For each pair checks
    (1+t2)^N ||f(t2)||^2 - (1+t1)^N ||f(t1)||^2 <= int N (1+t)^{N-1} M(t) dt
    with M(t) the L^2 mass of f on |xi| <= sqrt(N/(1+t)) and the integral taken
    by the trapezoid rule.  The per-pair tolerance is the trapezoid error bound
    for a monotone integrand, dt |g2 - g1| / 2, plus rounding.
    """
    if not N > 1.5 - sigma:
        raise ValueError(f"need N > 3/2 - sigma = {1.5 - sigma}, got N = {N}")
    snaps = [(float(s[0]), s[1]) for s in snapshots]
    if len(snaps) < 2:
        raise InsufficientSamples("splitting_check needs at least two snapshots")
    t = np.array([s[0] for s in snaps])
    if np.any(np.diff(t) <= 0):
        raise ValueError("snapshot times must increase")
    if t[0] < N - 1 - 1e-12:
        raise ValueError(f"snapshots must start at t >= N - 1 = {N - 1}, got {t[0]}")

    energy = np.array([l2_norm_sq(f) for _, f in snaps])
    mass = np.array([ball_mass(f, math.sqrt(N / (1 + tt))) for tt, f in snaps])
    g = N * (1 + t) ** (N - 1) * mass
    weighted = (1 + t) ** N * energy
    lhs = np.diff(weighted)
    dt = np.diff(t)
    rhs = 0.5 * dt * (g[1:] + g[:-1])
    tol = 0.5 * dt * np.abs(np.diff(g)) + rtol * (weighted[1:] + weighted[:-1])
    excess = lhs - rhs - tol
    max_violation = float(max(0.0, excess.max()))

    q_theory = N - 2.5 + sigma
    pos = g > 0
    if pos.sum() >= 2:
        q_fit, *_ = _loglog_fit(np.log1p(t[pos]), np.log(g[pos]))
        const = float(np.max(g[pos] / (1 + t[pos]) ** q_theory))
    else:
        q_fit, const = math.nan, 0.0
    return SplittingReport(N, sigma, t, lhs, rhs, tol, g, max_violation, q_fit, const)


@dataclass
class SplittingXReport:
    N: float
    theta: float
    sigma: float
    k: float
    t: np.ndarray
    derivative: np.ndarray
    residual: np.ndarray  # d/dt X^{k-1} + theta X^{k+1}
    tolerance: np.ndarray
    c_star: float  # sup over samples of the low-frequency Y^sigma bound
    fit: DecayFit | None
    expected_exponent: float
    notes: list = field(default_factory=list)

    @property
    def violations(self) -> int:
        return int(np.sum(self.residual > self.tolerance))

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _column(bundle: SeriesBundle, prefix: str, kind: NormKind) -> np.ndarray:
    name = prefix + kind.label
    if name not in bundle:
        raise KeyError(f"series {name!r} is required; bundle has {bundle.names}")
    return bundle.column(name)


def splitting_check_x(bundle: SeriesBundle, N: float, theta: float, sigma: float, k: float,
                      *, prefix: str = "u.", window=(10.0, 300.0),
                      rtol: float = 1e-10) -> SplittingXReport:
    """Check d/dt ||f||_{X^{k-1}} + theta ||f||_{X^{k+1}} <= 0 on sampled series.

    The derivative uses centred differences on interior samples and one-sided
    differences at the two ends.  A one-sided difference carries an O(dt)
    truncation error, so the end samples get an allowance of
    |f(t2) - 2 f(t1) + f(t0)| / dt (twice the estimated truncation term).
    """
    if not N > 1 + k / 2 - sigma / 2:
        raise ValueError(f"need N > 1 + k/2 - sigma/2 = {1 + k / 2 - sigma / 2}, got N = {N}")
    lo = _column(bundle, prefix, NormKind("Xsigma", (k - 1.0,)))
    hi = _column(bundle, prefix, NormKind("Xsigma", (k + 1.0,)))
    sup = _column(bundle, prefix, NormKind("LowFreqSup", (sigma, 1.0)))
    t = bundle.t
    if t.size < 3:
        raise InsufficientSamples("splitting_check_x needs at least three samples")
    d = np.gradient(lo, t, edge_order=1)
    resid = d + theta * hi
    tol = rtol * (np.abs(d) + theta * hi)
    h0, h1 = t[1] - t[0], t[-1] - t[-2]
    tol[0] += abs(lo[2] - 2 * lo[1] + lo[0]) / h0
    tol[-1] += abs(lo[-1] - 2 * lo[-2] + lo[-3]) / h1
    fit = None
    notes = []
    try:
        fit = fit_decay_exponent(NormSeries(prefix + f"Xsigma({k - 1:g})", t, lo), *window)
    except (InsufficientSamples, NonPositiveValues, ValueError) as exc:
        notes.append(f"no exponent fit: {exc}")
    return SplittingXReport(N, theta, sigma, k, t, d, resid, tol, float(sup.max()), fit,
                            -1.0 + sigma / 2 - k / 2, notes)


# ------------------------------------------------------ closed-form identities


def beta_time_integral(alpha: float, beta: float, t: float) -> float:
    """int_0^t (t - tau)^-alpha tau^-beta dtau = t^{1-alpha-beta} B(1-beta, 1-alpha)."""
    if alpha >= 1 or beta >= 1:
        raise ValueError(f"integral diverges for alpha={alpha}, beta={beta} (need both < 1)")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return float(t ** (1.0 - alpha - beta) * special.beta(1.0 - beta, 1.0 - alpha))


def heat_sup_bound(p: float, a: float) -> float:
    """sup_{x > 0} x^p exp(-a x^2), attained at x = sqrt(p / 2a)."""
    if not (p > 0 and a > 0):
        raise ValueError(f"need p > 0 and a > 0, got p={p}, a={a}")
    return float((p / (2.0 * a)) ** (p / 2.0) * math.exp(-p / 2.0))


# ------------------------------------------------- negative Sobolev interpolation


def hneg_continuum_constant(sigma: float, delta: float) -> float:
    """C with ||u||^2_{H^-delta} <= C Y^{2 delta/(3/2-sigma)} ||u||^{2(3-2sigma-2delta)/(3-2sigma)}."""
    return 1.0 + 4.0 * math.pi / (2.0 * math.pi) ** 3 / (3.0 - 2.0 * sigma - 2.0 * delta)


def _check_delta(sigma, delta):
    if not 0 < delta < 1.5 - sigma:
        raise ValueError(f"need 0 < delta < 3/2 - sigma = {1.5 - sigma}, got {delta}")


def optimal_radius(l2: float, y: float, sigma: float) -> float:
    """M balancing the two halves of the split: Y^2 M^{3-2 sigma} = ||u||^2."""
    return (l2 / y**2) ** (1.0 / (3.0 - 2.0 * sigma))


def hneg_split(v, sigma: float, delta: float) -> dict:
    """Split ||v||^2_{H^-delta} at the optimal radius and bound each half.

    ``low`` and ``high`` add up to ``lhs``; ``low_bound`` = Y^2 W(M) uses the
    lattice weight sum W, ``high_bound`` = M^{-2 delta} ||v||^2.
    """
    _check_delta(sigma, delta)
    g = v.grid
    c = v.coeffs
    dens = (c.real**2 + c.imag**2).sum(axis=0)
    l2 = l2_norm_sq(v)
    y = y_norm(v, sigma)
    M = optimal_radius(l2, y, sigma)
    w = g.xi_pow(-2.0 * delta) * dens
    inside = g.xi_abs <= M
    low = float(g.plancherel * np.sum(w[inside]))
    high = float(g.plancherel * np.sum(w[~inside]))
    return {
        "lhs": hs_norm_sq(v, -delta),
        "low": low,
        "high": high,
        "radius": M,
        "low_bound": y**2 * radial_weight_sum(g, -2.0 * delta - 2.0 * sigma, M),
        "high_bound": M ** (-2.0 * delta) * l2,
        "continuum_bound": hneg_continuum_constant(sigma, delta) * M ** (-2.0 * delta) * l2,
    }


@dataclass
class HnegReport:
    sigma: float
    delta: float
    t: np.ndarray
    hneg: np.ndarray
    bound: np.ndarray
    radius: np.ndarray
    fit: DecayFit | None
    expected_exponent: float

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.hneg / self.bound))

    @property
    def ok(self) -> bool:
        return self.max_ratio <= 1.0 + 1e-12


def hneg_interp_bound(bundle: SeriesBundle, sigma: float, delta: float, *, prefix: str = "u.",
                      grid=None, window=(10.0, 300.0)) -> HnegReport:
    """Per-sample interpolation bound for the H^-delta series plus its decay fit.

    Needs the L2Sq, Ysigma(sigma) and HnegSq(delta) columns.  With ``grid`` the
    low-frequency half uses the exact lattice weight sum; otherwise the
    continuum constant.
    """
    _check_delta(sigma, delta)
    l2 = _column(bundle, prefix, NormKind("L2Sq"))
    y = _column(bundle, prefix, NormKind("Ysigma", (sigma,)))
    hn = _column(bundle, prefix, NormKind("HnegSq", (delta,)))
    t = bundle.t
    M = (l2 / y**2) ** (1.0 / (3.0 - 2.0 * sigma))
    if grid is None:
        bound = hneg_continuum_constant(sigma, delta) * M ** (-2.0 * delta) * l2
    else:
        W = np.array([radial_weight_sum(grid, -2.0 * delta - 2.0 * sigma, m) for m in M])
        bound = y**2 * W + M ** (-2.0 * delta) * l2
    fit = None
    try:
        fit = fit_decay_exponent(NormSeries(prefix + f"HnegSq({delta:g})", t, hn), *window)
    except (InsufficientSamples, NonPositiveValues):
        pass
    return HnegReport(sigma, delta, t, hn, bound, M, fit, -1.5 + sigma + delta)
