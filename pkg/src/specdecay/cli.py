"""Command-line entry point.

Exit status: 0 when every requested verdict passes, 1 when a verdict fails,
2 for usage errors (bad arguments, unreadable or invalid config/input files).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import io as sio
from .analysis import fit_decay_exponent, heat_oracle_slope
from .config import ConfigError, load_config
from .dynamics import CFLViolation, continue_run, run
from .initial_data import measure
from .dynamics import initial_fields

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 't_lo,t_hi', got {text!r}") from None
    if not 0 <= lo < hi:
        raise argparse.ArgumentTypeError(f"window must satisfy 0 <= t_lo < t_hi, got {text!r}")
    return lo, hi


def _config(args):
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except ConfigError as exc:
        raise UsageError(f"{args.config}: {exc}") from None
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    if getattr(args, "output_dir", None) is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.output_dir)
    return cfg


def _verdicts(result) -> list[dict]:
    cfg = result.config
    out = []
    for name, target in cfg.expected_exponents.items():
        entry = {"series": name, "expected": target, "tolerance": cfg.expected_tolerance,
                 "window": list(cfg.fit_window)}
        if name not in result.bundle:
            entry.update(passed=False, error=f"no series named {name!r}")
        else:
            try:
                fit = fit_decay_exponent(result.bundle[name], *cfg.fit_window)
            except ValueError as exc:
                entry.update(passed=False, error=str(exc))
            else:
                entry.update(exponent=fit.exponent, stderr=fit.stderr, r_squared=fit.r_squared,
                             passed=fit.within(target, cfg.expected_tolerance))
        out.append(entry)
    return out


def _report_run(result) -> int:
    verdicts = _verdicts(result)
    print(f"t_end={result.state.t:g} steps={result.state.step} samples={len(result.bundle)}")
    print(f"max |energy budget residual| / E0 = {result.max_budget_residual():.3e}")
    if result.divergence:
        print(f"max divergence residual = {max(d for _, d in result.divergence):.3e}")
    for v in verdicts:
        tag = "PASS" if v["passed"] else "FAIL"
        if "exponent" in v:
            print(f"{tag}  {v['series']}: exponent {v['exponent']:+.4f} "
                  f"(expected {v['expected']:+.4f} +/- {v['tolerance']:g})")
        else:
            print(f"{tag}  {v['series']}: {v['error']}")
    if result.config.output_dir:
        sio.atomic_write_text(Path(result.config.output_dir) / "verdicts.json",
                              json.dumps(verdicts, indent=2) + "\n")
    return EXIT_OK if all(v["passed"] for v in verdicts) else EXIT_FAIL


def cmd_run(args) -> int:
    cfg = _config(args)
    return _report_run(run(cfg))


def cmd_resume(args) -> int:
    cfg = _config(args)
    try:
        state = sio.load_checkpoint(args.checkpoint, dt=cfg.dt)
    except OSError as exc:
        raise UsageError(f"cannot read checkpoint: {exc}") from None
    except sio.CheckpointError as exc:
        raise UsageError(f"{args.checkpoint}: {exc}") from None
    try:
        result = continue_run(cfg, state)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _report_run(result)


def cmd_gen(args) -> int:
    cfg = _config(args)
    u, b = initial_fields(cfg)
    report = {"u": measure(u, [cfg.u_profile.sigma])}
    if b is not None:
        report["b"] = measure(b, [cfg.b_profile.sigma])
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if cfg.output_dir:
        sio.atomic_write_text(Path(cfg.output_dir) / "initial_report.json", text)
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        bundle = sio.load_csv(args.csv)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"{args.csv}: {exc}") from None
    names = args.norm or [n for n in bundle.names]
    status = EXIT_OK
    for name in names:
        col = name if name in bundle else f"u.{name}"
        if col not in bundle:
            raise UsageError(f"no series {name!r} in {args.csv}; have {', '.join(bundle.names)}")
        try:
            fit = fit_decay_exponent(bundle[col], *args.window)
        except ValueError as exc:
            print(f"FAIL  {col}: {exc}")
            status = EXIT_FAIL
            continue
        line = (f"{col}: exponent {fit.exponent:+.6f} stderr {fit.stderr:.2e} "
                f"r2 {fit.r_squared:.6f} n={fit.n_samples} window [{args.window[0]:g}, {args.window[1]:g}]")
        if args.expect is None:
            print(line)
        else:
            ok = fit.within(args.expect, args.tol)
            print(("PASS  " if ok else "FAIL  ") + line + f" expected {args.expect:+g} +/- {args.tol:g}")
            if not ok:
                status = EXIT_FAIL
    return status


def cmd_oracle(args) -> int:
    try:
        slope = heat_oracle_slope(args.sigma, t_lo=args.t_lo, t_hi=args.t_hi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    target = -1.5 + args.sigma
    ok = abs(slope - target) <= args.tol
    print(f"{'PASS' if ok else 'FAIL'}  heat oracle sigma={args.sigma:g}: slope {slope:+.9f} "
          f"(expected {target:+g} +/- {args.tol:g}) over t in [{args.t_lo:g}, {args.t_hi:g}]")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(echo=print)
    failed = [r for r in results if not r.passed]
    total = sum(r.seconds for r in results)
    print(f"{len(results) - len(failed)}/{len(results)} checks passed in {total:.1f}s")
    return EXIT_OK if not failed else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="specdecay", description="Spectral decay-rate experiments.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_overrides(sp):
        sp.add_argument("--output-dir", help="override output_dir from the config")
        sp.add_argument("--seed", type=int, help="override the config seed")

    sp = sub.add_parser("run", help="simulate a config and check expected exponents")
    sp.add_argument("config")
    with_overrides(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("resume", help="continue a run from a checkpoint")
    sp.add_argument("checkpoint")
    sp.add_argument("config")
    with_overrides(sp)
    sp.set_defaults(func=cmd_resume)

    sp = sub.add_parser("gen", help="report norms of the generated initial data")
    sp.add_argument("config")
    with_overrides(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("analyze", help="fit decay exponents from a series CSV")
    sp.add_argument("csv")
    sp.add_argument("--window", type=_window, default=(10.0, 300.0), help="t_lo,t_hi")
    sp.add_argument("--norm", action="append", help="series name (repeatable; default all)")
    sp.add_argument("--expect", type=float, help="expected exponent for a verdict")
    sp.add_argument("--tol", type=float, default=0.1)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("oracle", help="continuum reference rates")
    osub = sp.add_subparsers(dest="oracle", required=True, parser_class=_Parser)
    hp = osub.add_parser("heat", help="heat-flow L2 decay slope for power-law data")
    hp.add_argument("--sigma", type=float, required=True)
    hp.add_argument("--t-lo", type=float, default=10.0)
    hp.add_argument("--t-hi", type=float, default=1e3)
    hp.add_argument("--tol", type=float, default=1e-3)
    hp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("selftest", help="oracle and invariant checks on small grids")
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"specdecay: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CFLViolation as exc:
        print(f"specdecay: {exc}", file=sys.stderr)
        return EXIT_FAIL
