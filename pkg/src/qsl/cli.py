"""Command-line front end: ``qsl bounds|forbid|ratio|verify|evolve``.

Exit codes: 0 success, 1 property violation, 2 alpha estimates
incompatible, 64 usage error, 65 malformed input data.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bounds, composite, dynamics, suites
from .errors import Incompatible, NotReached, QslError, StateFormatError
from .states import (CompositeState, DensityMatrix, PureState, TwoLevelState,
                     ensemble_to_density, read_state_file)

EXIT_OK, EXIT_VIOLATION, EXIT_INCOMPATIBLE, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65
UNITS = ("natural", "pi_hbar_over_2E")
FORMATS = ("csv", "json")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    seed: int = 0
    eps_resolution: int = 21
    grid_ladder: list = field(default_factory=lambda: list(bounds.GridSpec().theta_spacings))
    output_format: str = "csv"
    units: str = "pi_hbar_over_2E"

    def validate(self):
        if self.seed < 0:
            raise UsageError("seed must be a non-negative integer")
        if self.eps_resolution < 2:
            raise UsageError("eps resolution must be at least 2")
        if len(self.grid_ladder) < 3 or any(b >= a for a, b in zip(self.grid_ladder, self.grid_ladder[1:])):
            raise UsageError("grid ladder needs at least three strictly decreasing spacings")
        if self.output_format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        if self.units not in UNITS:
            raise UsageError(f"units must be one of {UNITS}")
        return self

    @property
    def theta_counts(self) -> tuple:
        return tuple(int(round(2.0 * math.pi / s)) for s in self.grid_ladder)


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        unknown = set(data) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for k, v in data.items():
            setattr(cfg, k, v)
    env_seed = os.environ.get("QSL_SEED")
    if args.seed is not None:
        cfg.seed = args.seed
    elif env_seed is not None and not (args.config and "seed" in data):
        try:
            cfg.seed = int(env_seed)
        except ValueError:
            raise UsageError(f"QSL_SEED must be an integer, got {env_seed!r}")
    if args.eps_resolution is not None:
        cfg.eps_resolution = args.eps_resolution
    if args.theta_counts is not None:
        cfg.grid_ladder = [2.0 * math.pi / n for n in args.theta_counts]
    if args.format is not None:
        cfg.output_format = args.format
    if args.units is not None:
        cfg.units = args.units
    return cfg.validate()


# ----------------------------------------------------------------------------
# Output

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return format(float(v), ".12g")


def _emit(columns: dict, cfg: RunConfig, out_path, extra: dict | None = None):
    names = list(columns)
    if cfg.output_format == "csv":
        rows = [",".join(names)]
        for row in zip(*columns.values()):
            rows.append(",".join(_fmt(v) for v in row))
        text = "\n".join(rows) + "\n"
    else:
        payload = {k: [v if isinstance(v, str) else float(v) for v in vals]
                   for k, vals in columns.items()}
        if extra:
            payload.update(extra)
        text = json.dumps(payload) + "\n"
    _write(text, out_path)


def _write(text: str, out_path):
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)


def _time_scale(cfg: RunConfig, e: float) -> float:
    """Multiply natural times by this to get displayed times."""
    if cfg.units == "natural":
        return 1.0
    if e <= 0:
        raise UsageError("times in units of pi hbar/(2E) need E > 0; use --units natural")
    return 2.0 * e / math.pi


# ----------------------------------------------------------------------------
# Commands

def cmd_bounds(args, cfg: RunConfig) -> int:
    eps = np.linspace(0.0, 1.0, cfg.eps_resolution)
    cols = {k: [] for k in ("eps", "alpha_lower", "alpha_err", "alpha_upper", "beta", "beta_sq")}
    status = EXIT_OK
    for i, e in enumerate(eps):
        grid = bounds.GridSpec(theta_counts=cfg.theta_counts, seed=cfg.seed + i)
        est = bounds.alpha(float(e), grid, strict=False)
        if not est.compatible:
            print(f"qsl: alpha estimates incompatible at eps={e:.6g}: "
                  f"upper {est.upper:.6g}, lower {est.lower.value_at_zero:.6g} "
                  f"+- {est.lower.error_bar:.2g}", file=sys.stderr)
            status = EXIT_INCOMPATIBLE
        b = bounds.beta(float(e))
        for k, v in zip(cols, (e, est.lower.value_at_zero, est.lower.error_bar,
                               est.upper, b, b * b)):
            cols[k].append(v)
    _emit(cols, cfg, args.out)
    return status


def cmd_forbid(args, cfg: RunConfig) -> int:
    e, de, xi = args.e, args.de, args.xi
    if not (e > 0 and de > 0):
        raise UsageError("--e and --de must be positive")
    if not 0 < xi < 1:
        raise UsageError("--xi must lie in (0, 1)")
    scale = _time_scale(cfg, e)
    t0 = bounds.orthogonality_time(e, de)
    t_max = t0 if args.t_max is None else args.t_max / scale
    if t_max > t0 * (1 + 1e-12):
        raise UsageError(f"--t-max beyond the orthogonality time {t0 * scale:.12g}")
    # Two-level state with the requested mean energy; its spread follows from xi.
    omega = TwoLevelState(xi, e / (xi * xi)).pure
    t = np.linspace(0.0, t_max, args.steps + 1)
    fa, fb = bounds.forbidden_floor_parts(t, e, de)
    p = dynamics.survival_probability(omega, t)
    cols = {"t": t * scale, "floor_alpha": fa, "floor_beta": fb,
            "floor": np.maximum(fa, fb), "P_omega": p}
    extra = {"omega_spread": omega.energy_spread}
    if args.eps is not None:
        try:
            tc = dynamics.time_to_fidelity(omega, args.eps, 8.0 * t0)
            touch = {"t": tc * scale, "P": args.eps,
                     "floor": float(bounds.forbidden_floor(min(tc, t0), e, de))}
        except NotReached as exc:
            touch = {"t": None, "P": args.eps, "min_P": exc.min_probability}
        extra["touch"] = touch
        if cfg.output_format == "csv":
            print(f"touch: t={_fmt(touch['t']) if touch['t'] is not None else 'never'} "
                  f"P={_fmt(args.eps)}", file=sys.stderr)
    _emit(cols, cfg, args.out, extra)
    return EXIT_OK


def cmd_ratio(args, cfg: RunConfig) -> int:
    if args.m is None or args.m < 2:
        raise UsageError("--m must be an integer >= 2")
    curve = composite.ratio_curve(args.m, np.linspace(0.0, 1.0, cfg.eps_resolution))
    cols = {"eps": [p[0] for p in curve.points], "r_lower": [p[1] for p in curve.points],
            "branch": [p[2] for p in curve.points]}
    _emit(cols, cfg, args.out)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    reports = suites.run_suite(args.suite, cfg.seed)
    ok = all(r["ok"] for r in reports)
    payload = {"seed": cfg.seed, "suite": args.suite, "ok": ok, "reports": reports}
    _write(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_evolve(args, cfg: RunConfig) -> int:
    try:
        obj = read_state_file(args.state_file)
    except QslError as exc:
        raise StateFormatError(str(exc)) from exc
    if isinstance(obj, CompositeState):
        obj = obj.as_pure_state()
    if isinstance(obj, tuple):
        rho = ensemble_to_density(*obj)
        e = rho.mean_energy
    else:
        rho = None
        e = obj.mean_energy
    scale = _time_scale(cfg, e)
    t_max = args.t_max / scale
    t = np.linspace(0.0, t_max, args.steps + 1)
    if rho is None:
        cols = {"t": t * scale, "P": dynamics.survival_probability(obj, t)}
    else:
        f = [dynamics.uhlmann_fidelity(rho, dynamics.evolve_density(rho, float(x))) for x in t]
        cols = {"t": t * scale, "F": f}
    _emit(cols, cfg, args.out)
    return EXIT_OK


# ----------------------------------------------------------------------------
# Parser

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return v


def _counts(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--seed", type=_seed, default=None,
                   help="RNG seed (default: $QSL_SEED, else 0)")
    g.add_argument("--eps-resolution", type=int, default=None,
                   help="number of eps points on [0, 1] (default 21)")
    g.add_argument("--theta-counts", type=_counts, default=None,
                   help="theta grid sizes for the alpha lower estimate "
                        "(default 400,800,1600,3200)")
    g.add_argument("--out", default=None, help="output file (default stdout)")
    g.add_argument("--format", choices=FORMATS, default=None, help="csv (default) or json")
    g.add_argument("--units", choices=UNITS, default=None,
                   help="time units: pi_hbar_over_2E (default, t in units of pi hbar/(2E)) "
                        "or natural (hbar = 1)")
    g.add_argument("--config", default=None, help="JSON file with RunConfig fields; flags win")

    p = _Parser(prog="qsl", description="Quantum speed limit bounds and checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sb = sub.add_parser("bounds", parents=[common],
                        help="alpha and beta table",
                        description="Table of alpha (both estimates) and beta over eps: "
                                    "the data for the alpha/beta curves figure and for "
                                    "the lower-vs-upper alpha compatibility figure.")
    sb.set_defaults(func=cmd_bounds)

    sf = sub.add_parser("forbid", parents=[common],
                        help="forbidden region with a two-level trajectory",
                        description="Forbidden region of the (t, P) plane for given E and dE, "
                                    "with the P(t) trajectory of the two-level fast state: "
                                    "the data for the forbidden-region figure.")
    sf.add_argument("--e", type=float, required=True, help="mean energy E")
    sf.add_argument("--de", type=float, required=True, help="energy spread dE")
    sf.add_argument("--xi", type=float, default=0.5, help="two-level parameter (default 0.5)")
    sf.add_argument("--eps", type=float, default=None, help="mark the first time P = eps")
    sf.add_argument("--t-max", type=float, default=None,
                    help="last time (default: orthogonality time)")
    sf.add_argument("--steps", type=_positive_int, default=400)
    sf.set_defaults(func=cmd_forbid)

    sr = sub.add_parser("ratio", parents=[common],
                        help="slowdown ratio of homogeneous product states",
                        description="Lower bound on the slowdown ratio R(eps) of homogeneous "
                                    "separable states: the data for the ratio figure (M = 5 there).")
    sr.add_argument("--m", type=int, required=True, help="number of subsystems (>= 2)")
    sr.set_defaults(func=cmd_ratio)

    sv = sub.add_parser("verify", parents=[common], help="run property suites",
                        description="Run seeded property suites and print a JSON report. "
                                    "Exit 1 on any violation.")
    sv.add_argument("suite", choices=list(suites.SUITES) + ["all"])
    sv.set_defaults(func=cmd_verify)

    se = sub.add_parser("evolve", parents=[common], help="trajectory of a state file",
                        description="P(t) for a pure or composite state file, or the "
                                    "Uhlmann fidelity F(t) for an ensemble.")
    se.add_argument("state_file")
    se.add_argument("--t-max", type=float, required=True)
    se.add_argument("--steps", type=_positive_int, default=200)
    se.set_defaults(func=cmd_evolve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"qsl: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StateFormatError as exc:
        print(f"qsl: bad state file: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Incompatible as exc:
        print(f"qsl: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE


if __name__ == "__main__":
    sys.exit(main())
