"""Small-data Navier-Stokes: energy and Lei-Lin decay, plus the splitting inequality.

Runs one 64^3 simulation (about two minutes on one core), then reports
the fitted exponents of ||u||^2 and ||u||_{X^-1}, the growth of the
pseudo-measure norm, and whether d/dt X^-1 + 0.9 X^1 <= 0 held at every sample.

    python3 demos/nse_small_data.py [--sigma 0] [--n 64]
"""

import argparse

from specdecay import fit_decay_exponent, parse_config, run
from specdecay.analysis import splitting_check_x


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sigma", type=float, default=0.0)
    ap.add_argument("--n", type=int, default=64)
    args = ap.parse_args()
    s = args.sigma
    cfg = parse_config(f"""
equation = nse
n = {args.n}
box_length = {args.n}*pi
dt = 1
t_end = 300
seed = 0
u_profile.sigma = {s}
u_profile.amplitude = 1
smallness_target = 0.01
norms = L2Sq, Xsigma(-1), Xsigma(1), Ysigma({s}), LowFreqSup({s},1)
""")
    r = run(cfg, write_outputs=False)
    b = r.bundle
    l2 = fit_decay_exponent(b["u.L2Sq"], 10, 300)
    x = fit_decay_exponent(b["u.Xsigma(-1)"], 10, 300)
    y = b.column(f"u.Ysigma({s:g})")
    rep = splitting_check_x(b, 2.0, 0.9, s, 0.0)
    print(f"L2^2 exponent   {l2.exponent:+.4f}  (heat rate {-1.5 + s:+.2f})")
    print(f"X^-1 exponent   {x.exponent:+.4f}  (heat rate {-1 + s / 2:+.2f})")
    print(f"sup Y / Y(0)    {y.max() / y[0]:.4f}")
    print(f"inequality      {rep.violations} violations over {rep.t.size} samples")
    print(f"energy budget   {r.max_budget_residual():.2e} relative")


if __name__ == "__main__":
    main()
