"""Acceptance criteria, one test per criterion and parameter case.

The heavy runs (64^3, t in [0, 300]) are shared through module fixtures.
Every test records a PASS/FAIL line that is printed in the session summary.
"""

import math
import time
from dataclasses import replace

import pytest

from specdecay import fit_decay_exponent, parse_config, run
from specdecay.analysis import hneg_interp_bound, splitting_check, splitting_check_x
from specdecay.cli import main as cli_main
from specdecay.selftest import run_selftest

from conftest import VERDICTS

pytestmark = pytest.mark.acceptance

WINDOW = (10.0, 300.0)

BASE = """
n = 64
box_length = 64*pi
dt = 1
t_end = 300
seed = 0
"""


def verdict(criterion, label, ok, detail):
    VERDICTS.append(f"{'PASS' if ok else 'FAIL'}  criterion {criterion} [{label}] {detail}")
    assert ok, detail


def timed_run(text, **kw):
    t0 = time.perf_counter()
    r = run(parse_config(text), write_outputs=False, **kw)
    return r, time.perf_counter() - t0


def heat_text(sigma):
    return BASE + f"""equation = heat
u_profile.sigma = {sigma}
u_profile.amplitude = 1
norms = L2Sq, Ysigma({sigma}), HnegSq(0.5)
"""


def nse_text(sigma):
    extra = ", HnegSq(0.5)" if sigma == 0 else ""
    return BASE + f"""equation = nse
u_profile.sigma = {sigma}
u_profile.amplitude = 1
smallness_target = 0.01
norms = L2Sq, Xsigma(-1), Xsigma(1), Ysigma({sigma}), LowFreqSup({sigma},1){extra}
"""


def mhd_text(s1, s2):
    return BASE + f"""equation = hall_mhd
sigma1 = {s1}
u_profile.amplitude = 1
sigma2 = {s2}
b_profile.amplitude = 1
smallness_target = 0.01
norms = L2Sq, Ysigma({s1}), Ysigma({s2})
"""


_cache = {}


def cached(key, factory):
    if key not in _cache:
        _cache[key] = factory()
    return _cache[key]


def heat_run(sigma):
    return cached(("heat", sigma), lambda: timed_run(heat_text(sigma)))


def nse_run(sigma):
    return cached(("nse", sigma), lambda: timed_run(nse_text(sigma)))


def mhd_run(s1, s2):
    return cached(("mhd", s1, s2), lambda: timed_run(mhd_text(s1, s2)))


@pytest.mark.parametrize("sigma", [-1.0, -0.5, 0.0, 0.5, 1.0])
def test_criterion_1_heat_oracle(sigma, capsys):
    t0 = time.perf_counter()
    code = cli_main(["oracle", "heat", "--sigma", str(sigma)])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out.strip().split(None, 1)[-1]
    verdict(1, f"sigma={sigma:g}", code == 0 and elapsed < 1.0, f"{out} ({elapsed:.2f}s)")


@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.0])
def test_criterion_2_heat_lattice(sigma):
    r, secs = heat_run(sigma)
    fit = fit_decay_exponent(r.bundle["u.L2Sq"], *WINDOW)
    target = -1.5 + sigma
    ok = fit.within(target, 0.1) and secs < 60
    verdict(2, f"sigma={sigma:g}", ok,
            f"L2 exponent {fit.exponent:+.4f}, expected {target:+.2f} +/- 0.1 ({secs:.0f}s)")


@pytest.mark.slow
@pytest.mark.parametrize("sigma", [0.0, 1.0])
def test_criterion_3_nse_energy_rate(sigma):
    r, secs = nse_run(sigma)
    fit = fit_decay_exponent(r.bundle["u.L2Sq"], *WINDOW)
    y = r.bundle.column(f"u.Ysigma({sigma:g})")
    ratio = float(y.max() / y[0])
    target = -1.5 + sigma
    ok = fit.within(target, 0.2) and ratio <= 2.0 and secs <= 600
    verdict(3, f"sigma={sigma:g}", ok,
            f"L2 exponent {fit.exponent:+.4f}, expected {target:+.2f} +/- 0.2; "
            f"sup Y/Y0 = {ratio:.4f} <= 2 ({secs:.0f}s)")


@pytest.mark.slow
@pytest.mark.parametrize("sigma", [0.0, 1.0])
def test_criterion_4_nse_lei_lin_rate(sigma):
    r, _ = nse_run(sigma)
    fit = fit_decay_exponent(r.bundle["u.Xsigma(-1)"], *WINDOW)
    target = -1.0 + sigma / 2
    rep = splitting_check_x(r.bundle, 2.0, 0.9, sigma, 0.0)
    ok = fit.within(target, 0.2) and rep.ok
    verdict(4, f"sigma={sigma:g}", ok,
            f"X^-1 exponent {fit.exponent:+.4f}, expected {target:+.2f} +/- 0.2; "
            f"differential inequality violations {rep.violations}/{rep.t.size}")


@pytest.mark.slow
@pytest.mark.parametrize("s1, s2", [(0.0, 0.0), (1.0, -1.0)])
def test_criterion_5_hall_mhd(s1, s2):
    r, secs = mhd_run(s1, s2)
    fit = fit_decay_exponent(r.bundle["total.L2Sq"], *WINDOW)
    target = -1.5 + max(s1, s2)
    ok = fit.within(target, 0.2)
    detail = f"combined L2 exponent {fit.exponent:+.4f}, expected {target:+.2f} +/- 0.2"
    if s1 - s2 / 2 <= 1:
        y = r.bundle.column(f"b.Ysigma({s2:g})")
        ratio = float(y.max() / y[0])
        ok = ok and ratio <= 2.0
        detail += f"; sup Y(B)/Y(B0) = {ratio:.4f} <= 2"
    else:
        detail += "; index condition fails, Y(B) bound not required"
    verdict(5, f"sigma1={s1:g}, sigma2={s2:g}", ok, f"{detail} ({secs:.0f}s)")


def test_criterion_6_hneg_heat():
    r, _ = heat_run(0.0)
    rep = hneg_interp_bound(r.bundle, 0.0, 0.5, grid=r.config.grid)
    ok = rep.fit.within(-1.0, 0.2)
    verdict(6, "heat", ok, f"H^-1/2 exponent {rep.fit.exponent:+.4f}, expected -1.00 +/- 0.2; "
            f"interpolation bound ratio {rep.max_ratio:.3f}")


@pytest.mark.slow
def test_criterion_6_hneg_nse():
    r, _ = nse_run(0.0)
    rep = hneg_interp_bound(r.bundle, 0.0, 0.5, grid=r.config.grid)
    ok = rep.fit.within(-1.0, 0.25)
    verdict(6, "nse", ok, f"H^-1/2 exponent {rep.fit.exponent:+.4f}, expected -1.00 +/- 0.25; "
            f"interpolation bound ratio {rep.max_ratio:.3f}")


@pytest.mark.slow
def test_criterion_7_selftest():
    t0 = time.perf_counter()
    results = run_selftest()
    elapsed = time.perf_counter() - t0
    failed = [r.name for r in results if not r.passed]
    for r in results:
        VERDICTS.append(f"      {r.line()}")
    verdict(7, "selftest", not failed and elapsed < 120,
            f"{len(results) - len(failed)}/{len(results)} checks passed in {elapsed:.0f}s"
            + (f"; failed: {', '.join(failed)}" if failed else ""))


def test_criterion_8_fourier_splitting():
    text = heat_text(0.0)
    cfg = replace(parse_config(text), norms=parse_config(text).norms[:1])
    r = run(cfg, write_outputs=False, keep_snapshots=True, snapshot_every=5)
    snaps = [(t, u) for t, u, _ in r.snapshots if t >= 3.0]
    rep = splitting_check(snaps, 4.0, 0.0)
    ok = rep.ok and abs(rep.reconstructed_exponent + 1.5) <= 0.1
    verdict(8, "sigma=0, N=4", ok,
            f"violations {rep.violations}/{rep.lhs.size}; reconstructed exponent "
            f"{rep.reconstructed_exponent:+.4f}, expected -1.50 +/- 0.1")
