"""Hall-MHD decay with separate regularity for velocity and magnetic field.

Uses demos/configs/hall_mhd_small.cfg by default (32^3, quick).  The combined
energy follows the slower of the two fields; the magnetic pseudo-measure norm
stays bounded when sigma1 - sigma2/2 <= 1.

    python3 demos/hall_mhd.py [config]
"""

import sys
from pathlib import Path

from specdecay import fit_decay_exponent, load_config, run


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "configs" / "hall_mhd_small.cfg"
    cfg = load_config(path)
    r = run(cfg, write_outputs=False)
    b = r.bundle
    lo, hi = cfg.fit_window
    for name in ("u.L2Sq", "b.L2Sq", "total.L2Sq"):
        print(f"{name:<12} exponent {fit_decay_exponent(b[name], lo, hi).exponent:+.4f}")
    s2 = cfg.b_profile.sigma
    y = b.column(f"b.Ysigma({s2:g})")
    print(f"sup Y(B)/Y(B0) {y.max() / y[0]:.4f}")
    print(f"energy budget  {r.max_budget_residual():.2e} relative")


if __name__ == "__main__":
    main()
