"""Declarative experiment configuration (flat ``key = value`` text).

Example::

    # heat flow, sigma = 0
    equation = heat
    n = 64
    box_length = 64*pi
    dt = 1.0
    t_end = 300
    seed = 7

    [u_profile]
    sigma = 0
    amplitude = 1.0

A ``[section]`` header prefixes the following keys with ``section.``; dotted
keys (``u_profile.sigma = 0``) are equivalent, and ``sigma1`` / ``sigma2`` are
accepted for ``u_profile.sigma`` / ``b_profile.sigma``.  ``#`` starts a comment.
Unknown and duplicated keys are errors.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .initial_data import SpectralProfile
from .norms import NormKind
from .spectral import InvalidBoxLength, OddResolution, ResolutionTooSmall, make_grid

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "UnknownKey",
    "DuplicateKey",
    "MissingKey",
    "InvalidValue",
    "RangeViolation",
    "Sigma2Range",
    "parse_config",
    "load_config",
    "EQUATIONS",
]

EQUATIONS = ("heat", "nse", "hall_mhd")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class UnknownKey(ConfigError):
    pass


class DuplicateKey(ConfigError):
    pass


class MissingKey(ConfigError):
    pass


class InvalidValue(ConfigError):
    pass


class RangeViolation(ConfigError):
    pass


class Sigma2Range(RangeViolation):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    equation: str
    n: int
    box_length: float
    dt: float
    t_end: float
    u_profile: SpectralProfile
    seed: int
    sample_every: int = 1
    b_profile: SpectralProfile | None = None
    smallness_target: float | None = None
    norms: tuple[NormKind, ...] = ()
    fit_window: tuple[float, float] = (10.0, 300.0)
    expected_exponents: dict[str, float] = field(default_factory=dict)
    expected_tolerance: float = 0.1
    checkpoint_every: int = 0
    output_dir: str | None = None

    @property
    def grid(self):
        return make_grid(self.n, self.box_length)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def scheme(self) -> str:
        return "HeatOnly" if self.equation == "heat" else "IFRK4"

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Override the run seed; profile seeds follow (u: seed, b: seed + 1)."""
        u = replace(self.u_profile, seed=seed)
        b = None if self.b_profile is None else replace(self.b_profile, seed=seed + 1)
        return replace(self, seed=seed, u_profile=u, b_profile=b)


_PROFILE_KEYS = ("sigma", "amplitude", "xi_cut", "xi_floor", "seed")
_TOP_KEYS = (
    "equation", "n", "box_length", "dt", "t_end", "sample_every", "seed",
    "smallness_target", "norms", "fit_window", "expected_tolerance",
    "checkpoint_every", "output_dir",
)
_KNOWN = set(_TOP_KEYS) | {f"{p}.{k}" for p in ("u_profile", "b_profile") for k in _PROFILE_KEYS}

# shorthand for the velocity / magnetic envelope exponents
_ALIASES = {"sigma1": "u_profile.sigma", "sigma2": "b_profile.sigma"}

_PI_EXPR = re.compile(r"^\s*(?:([-+]?[0-9.eE+-]+)\s*\*?\s*)?pi\s*$")


def _float(text: str, key: str, line: int) -> float:
    m = _PI_EXPR.match(text)
    try:
        if m:
            return (float(m.group(1)) if m.group(1) else 1.0) * math.pi
        val = float(text)
    except ValueError:
        raise InvalidValue(f"{key}: expected a number, got {text!r}", line) from None
    if not math.isfinite(val):
        raise InvalidValue(f"{key}: value must be finite, got {text!r}", line)
    return val


def _int(text: str, key: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise InvalidValue(f"{key}: expected an integer, got {text!r}", line) from None


def split_norm_list(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        out.append(tail)
    return [s for s in out if s]


def _read_pairs(text: str) -> dict[str, tuple[str, int]]:
    pairs: dict[str, tuple[str, int]] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section:
                raise InvalidValue("empty section header", lineno)
            continue
        if "=" not in line:
            raise InvalidValue(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise InvalidValue("missing key", lineno)
        if section:
            key = f"{section}.{key}"
        key = _ALIASES.get(key, key)
        if key in pairs:
            raise DuplicateKey(f"duplicate key {key!r} (first set on line {pairs[key][1]})", lineno)
        if key not in _KNOWN and not key.startswith("expected."):
            raise UnknownKey(f"unknown key {key!r}", lineno)
        pairs[key] = (value, lineno)
    return pairs


def _profile(pairs, prefix: str, seed: int, default_cut: float, sigma_range, err_cls):
    def get(k):
        return pairs.get(f"{prefix}.{k}")

    for k in ("sigma", "amplitude"):
        if get(k) is None:
            raise MissingKey(f"missing required key {prefix}.{k}")
    sv, sl = get("sigma")
    sigma = _float(sv, f"{prefix}.sigma", sl)
    lo, hi = sigma_range
    if not lo <= sigma <= hi:
        raise err_cls(f"{prefix}.sigma={sigma} outside [{lo}, {hi}]", sl)
    av, al = get("amplitude")
    amp = _float(av, f"{prefix}.amplitude", al)
    if amp < 0:
        raise RangeViolation(f"{prefix}.amplitude must be >= 0", al)
    cut = default_cut
    if get("xi_cut") is not None:
        cv, cl = get("xi_cut")
        cut = _float(cv, f"{prefix}.xi_cut", cl)
        if not 0 < cut <= default_cut * (1 + 1e-12):
            raise RangeViolation(
                f"{prefix}.xi_cut={cut} must lie in (0, {default_cut:.6g}] (dealiasing band)", cl)
    floor = None
    if get("xi_floor") is not None:
        fv, fl = get("xi_floor")
        floor = _float(fv, f"{prefix}.xi_floor", fl)
        if floor < 0:
            raise RangeViolation(f"{prefix}.xi_floor must be >= 0", fl)
    if get("seed") is not None:
        dv, dl = get("seed")
        seed = _int(dv, f"{prefix}.seed", dl)
    return SpectralProfile(sigma=sigma, amplitude=amp, xi_cut=cut, xi_floor=floor, seed=seed)


def parse_config(text: str) -> ExperimentConfig:
    pairs = _read_pairs(text)

    for k in ("equation", "n", "box_length", "dt", "t_end", "seed"):
        if k not in pairs:
            raise MissingKey(f"missing required key {k!r}")

    eqv, eql = pairs["equation"]
    if eqv not in EQUATIONS:
        raise InvalidValue(f"equation must be one of {EQUATIONS}, got {eqv!r}", eql)

    nv, nl = pairs["n"]
    n = _int(nv, "n", nl)
    lv, ll = pairs["box_length"]
    box = _float(lv, "box_length", ll)
    try:
        grid = make_grid(n, box)
    except (OddResolution, ResolutionTooSmall) as exc:
        raise RangeViolation(str(exc), nl) from None
    except InvalidBoxLength as exc:
        raise RangeViolation(str(exc), ll) from None

    v, dl = pairs["dt"]
    dt = _float(v, "dt", dl)
    if dt <= 0:
        raise RangeViolation("dt must be positive", dl)
    v, tl = pairs["t_end"]
    t_end = _float(v, "t_end", tl)
    if t_end < 0:
        raise RangeViolation("t_end must be >= 0", tl)
    steps = t_end / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise RangeViolation(f"t_end={t_end} is not a whole number of steps dt={dt}", tl)
    v, sl = pairs["seed"]
    seed = _int(v, "seed", sl)
    if seed < 0:
        raise RangeViolation("seed must be >= 0", sl)

    sample_every = 1
    if "sample_every" in pairs:
        v, ln = pairs["sample_every"]
        sample_every = _int(v, "sample_every", ln)
        if sample_every < 1:
            raise RangeViolation("sample_every must be >= 1", ln)

    checkpoint_every = 0
    if "checkpoint_every" in pairs:
        v, ln = pairs["checkpoint_every"]
        checkpoint_every = _int(v, "checkpoint_every", ln)
        if checkpoint_every < 0:
            raise RangeViolation("checkpoint_every must be >= 0", ln)

    default_cut = (2.0 / 3.0) * grid.xi_max_axis
    u_profile = _profile(pairs, "u_profile", seed, default_cut, (-1.0, 1.0), RangeViolation)

    b_profile = None
    has_b = any(k.startswith("b_profile.") for k in pairs)
    if eqv == "hall_mhd":
        if not has_b:
            raise MissingKey("equation = hall_mhd requires b_profile.sigma and b_profile.amplitude")
        b_profile = _profile(pairs, "b_profile", seed + 1, default_cut, (-1.0, 0.0), Sigma2Range)
    elif has_b:
        line = min(ln for k, (_, ln) in pairs.items() if k.startswith("b_profile."))
        raise InvalidValue(f"b_profile given but equation = {eqv}", line)

    smallness = None
    if "smallness_target" in pairs:
        v, ln = pairs["smallness_target"]
        smallness = _float(v, "smallness_target", ln)
        if smallness <= 0:
            raise RangeViolation("smallness_target must be positive", ln)

    if "norms" in pairs:
        v, ln = pairs["norms"]
        try:
            norms = tuple(NormKind.parse(s) for s in split_norm_list(v))
        except ValueError as exc:
            raise InvalidValue(f"norms: {exc}", ln) from None
        if not norms:
            raise InvalidValue("norms: empty list", ln)
    else:
        norms = [NormKind("L2Sq"), NormKind("Xsigma", (-1.0,)), NormKind("Xsigma", (0.0,)),
                 NormKind("Ysigma", (u_profile.sigma,))]
        if b_profile is not None:
            norms.append(NormKind("Ysigma", (b_profile.sigma,)))
        norms = tuple(dict.fromkeys(norms))

    fit_window = (10.0, 300.0)
    if "fit_window" in pairs:
        v, ln = pairs["fit_window"]
        parts = [p.strip() for p in v.split(",")]
        if len(parts) != 2:
            raise InvalidValue("fit_window: expected 't_lo, t_hi'", ln)
        fit_window = (_float(parts[0], "fit_window", ln), _float(parts[1], "fit_window", ln))
        if not 0 <= fit_window[0] < fit_window[1]:
            raise RangeViolation("fit_window must satisfy 0 <= t_lo < t_hi", ln)

    tol = 0.1
    if "expected_tolerance" in pairs:
        v, ln = pairs["expected_tolerance"]
        tol = _float(v, "expected_tolerance", ln)
        if tol <= 0:
            raise RangeViolation("expected_tolerance must be positive", ln)

    expected = {}
    for k, (v, ln) in pairs.items():
        if k.startswith("expected."):
            name = k[len("expected."):]
            if not name:
                raise UnknownKey("expected.<series> needs a series name", ln)
            expected[name] = _float(v, k, ln)

    output_dir = pairs["output_dir"][0] if "output_dir" in pairs else None

    return ExperimentConfig(
        equation=eqv, n=n, box_length=box, dt=dt, t_end=t_end, u_profile=u_profile,
        seed=seed, sample_every=sample_every, b_profile=b_profile,
        smallness_target=smallness, norms=tuple(norms), fit_window=fit_window,
        expected_exponents=expected, expected_tolerance=tol,
        checkpoint_every=checkpoint_every, output_dir=output_dir,
    )


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())
