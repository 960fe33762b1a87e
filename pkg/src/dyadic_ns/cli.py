"""Command line: ``dyadic-ns suite|solve|norm``.

Exit codes: 0 success, 1 failed assertion (or non-contracting solve),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fieldio, norms
from .harness import (
    SUITES,
    ConfigError,
    HarnessConfig,
    read_config_file,
    run_suites,
    small_data,
    taylor_green,
)
from .mild_solver import NonContraction, picard_solve
from .spectral_core import Grid, random_band_field

_CONFIG_KEYS = ("dim", "grid", "seed", "r", "sigma", "T", "steps", "tol", "ensemble", "amp", "gamma")


def _number(text: str) -> float:
    return float(text)  # accepts "inf"


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="file of key = value lines; flags override it")
    p.add_argument("--dim", type=int)
    p.add_argument("--grid", type=int, help="points per axis")
    p.add_argument("--seed", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--T", type=float, help="time horizon")
    p.add_argument("--steps", type=int, help="number of positive time nodes M")
    p.add_argument("--tol", type=float)
    p.add_argument("--ensemble", type=int)
    p.add_argument("--amp", type=float)
    p.add_argument("--gamma", type=float)


def _config(args) -> HarnessConfig:
    data = read_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return HarnessConfig.from_mapping(data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyadic-ns", description="Dyadic analysis and mild Navier-Stokes solutions on the torus.")
    sub = parser.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("suite", help="run a verification suite")
    s.add_argument("name", help="suite name or 'all': " + ", ".join(SUITES))
    _add_config_flags(s)
    s.add_argument("--out", help="write the report here instead of stdout")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--parallel", action="store_true", help="run suites in worker processes")

    v = sub.add_parser("solve", help="Picard-solve from an initial field and write a trajectory file")
    v.add_argument("--init", choices=("taylor-green", "random"), default="random")
    _add_config_flags(v)
    v.add_argument("--out", default="trajectory.dnst")

    n = sub.add_parser("norm", help="evaluate a norm of a field or trajectory file")
    n.add_argument("--kind", required=True, choices=("lebesgue", "sobolev", "besov", "heatchar", "cheminlerner", "weighted", "uloc"))
    n.add_argument("--in", dest="path", required=True)
    n.add_argument("--q", type=_number, default=float("inf"))
    n.add_argument("--s", type=float, default=0.0)
    n.add_argument("--p", type=_number, default=2.0)
    n.add_argument("--mu", type=float, default=1.0)
    n.add_argument("--R", type=float, default=1.0)
    n.add_argument("--delta", type=float, default=1.0)
    return parser


def _cmd_suite(args) -> int:
    cfg = _config(args)
    names = list(SUITES) if args.name == "all" else [args.name]
    if args.name != "all" and args.name not in SUITES:
        print(f"unknown suite {args.name!r}; choose from: all, {', '.join(SUITES)}", file=sys.stderr)
        return 2
    reports = run_suites(names, cfg, parallel=args.parallel)
    if args.format == "json":
        if len(reports) == 1:
            text = reports[0].to_json() + "\n"
        else:
            text = json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2) + "\n"
    else:
        text = "".join(r.to_csv() if i == 0 else r.to_csv().split("\n", 1)[1] for i, r in enumerate(reports))
    if args.out:
        Path(args.out).write_text(text)
        if args.format == "csv":
            for r in reports:
                if r.series:
                    Path(args.out).with_suffix(f".{r.suite}.series.csv").write_text(r.series_csv())
    else:
        sys.stdout.write(text)
    for r in reports:
        print(f"{r.suite}: {'pass' if r.passed else 'FAIL'} ({r.wall_time:.1f} s)", file=sys.stderr)
    return max(r.exit_code for r in reports)


def _cmd_solve(args) -> int:
    cfg = _config(args)
    sc = cfg.solver()
    g: Grid = sc.grid
    u0 = taylor_green(g) if args.init == "taylor-green" else small_data(cfg.seed, g, cfg.gamma, cfg.amp)
    try:
        u, trace = picard_solve(u0, sc)
    except NonContraction as exc:
        print(f"non-contraction: {exc}", file=sys.stderr)
        return 1
    fieldio.write_series(args.out, u)
    print(json.dumps({
        "out": str(args.out),
        "iterations": trace.iterations,
        "increments": trace.increments,
        "residual": trace.residual,
        "t_floor": trace.t_floor,
    }, sort_keys=True))
    return 0


def _load(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
    return fieldio.read_series(path) if magic == b"DNST" else fieldio.read_field(path)


def _cmd_norm(args) -> int:
    obj = _load(args.path)
    series = isinstance(obj, norms.TimeSeriesField)
    kind = args.kind
    if kind in ("cheminlerner", "weighted") and not series:
        raise ConfigError(f"{kind} needs a trajectory file")
    if series and kind not in ("cheminlerner", "weighted"):
        obj = obj.final
    if kind == "lebesgue":
        params, value = {"q": args.q}, norms.lebesgue_norm(obj, args.q)
    elif kind == "sobolev":
        params, value = {"s": args.s}, norms.sobolev_norm(obj, args.s)
    elif kind == "besov":
        params, value = {"s": args.s, "q": args.q}, norms.besov_norm(obj, args.s, args.q)
    elif kind == "heatchar":
        params, value = {"s": args.s, "q": args.q, "delta": args.delta}, norms.heat_char_norm(obj, args.s, args.q, args.delta)
    elif kind == "cheminlerner":
        params, value = {"p": args.p, "s": args.s, "q": args.q}, norms.chemin_lerner_norm(obj, args.p, args.s, args.q)
    elif kind == "weighted":
        params, value = {"mu": args.mu}, norms.weighted_sup_norm(obj, args.mu)
    else:
        params, value = {"p": args.p, "R": args.R}, norms.uloc_norm(obj, args.p, args.R)
    clean = {k: (v if np.isfinite(v) else "inf") for k, v in params.items()}
    print(json.dumps({"kind": kind, "params": clean, "value": float(value)}, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"suite": _cmd_suite, "solve": _cmd_solve, "norm": _cmd_norm}
    try:
        return handlers[args.verb](args)
    except (ConfigError, fieldio.FieldFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def write_demo_field(path, dim: int = 2, n: int = 64, seed: int = 0, gamma: float = 1.0) -> None:
    """Write a random scalar field file (handy for trying the ``norm`` verb)."""
    fieldio.write_field(path, random_band_field(seed, Grid(dim, n), gamma=gamma))


if __name__ == "__main__":
    sys.exit(main())
