"""Command-line interface: ``conedelta <subcommand> [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical error.
Settings come from built-in defaults, then a flat TOML config file
(``--config``), then command-line flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import axisym, circle, constants, effective, report, schrod1d, specfun

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
WORKERS_ENV = "CONEDELTA_WORKERS"

DEFAULTS = {
    "constants": {},
    "mu1": {"beta": math.sqrt(2.0), "r_min": 0.05, "r_max": 10.0, "points": 200, "log_grid": False},
    "spectrum": {"theta": [0.1], "n_max": 3, "format": "csv"},
    "bounds": {"h": [0.01], "n_max": 3, "format": "csv"},
    "count": {"h": None, "theta": None, "gamma": 1.0, "C": 1.0},
    "direct": {"h": 0.25, "spacing": 0.02, "r_max": 8.0, "z_min": -2.0, "z_max": 8.0, "k": 1,
               "seed": 0, "tol": 1e-8},
    "verify": {"suite": "quick", "timing": True},
}


class UsageError(ValueError):
    pass


NUMERIC_ERRORS = (
    axisym.ConvergenceError,
    axisym.AssemblyError,
    constants.ConsistencyError,
    schrod1d.AssemblyError,
    specfun.BesselDomainError,
    FloatingPointError,
    ArithmeticError,
)


def _fmt(x, digits):
    return f"{x:.{digits}g}" if isinstance(x, float) else str(x)


def write_csv(rows: list[dict], out, digits: int = 12):
    if not rows:
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(rows[0].keys())
    for r in rows:
        w.writerow([_fmt(v, digits) for v in r.values()])
    out.write(buf.getvalue())


def write_json(obj, out):
    out.write(json.dumps(report._round(obj), indent=2, ensure_ascii=False) + "\n")


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn, items):
    """Parallel map whose results follow input order."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"invalid config {path}: {exc}") from None
    for k, v in data.items():
        if isinstance(v, dict):
            raise UsageError(f"config must be flat; key {k!r} holds a table")
    return data


def resolve(command: str, args: argparse.Namespace, file_cfg: dict) -> dict:
    """Defaults, overridden by the config file, overridden by flags."""
    cfg = dict(DEFAULTS[command])
    for k, v in file_cfg.items():
        if k in cfg:
            cfg[k] = v
    for k in cfg:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _require(cond, msg):
    if not cond:
        raise UsageError(msg)


def cmd_constants(cfg, out):
    write_json(constants.solve_model_constants().as_dict(), out)
    return EXIT_OK


def cmd_mu1(cfg, out):
    _require(0 < cfg["r_min"] < cfg["r_max"], "need 0 < r_min < r_max")
    _require(cfg["beta"] > 0, "beta must be positive")
    _require(int(cfg["points"]) >= 2, "points must be >= 2")
    space = np.geomspace if cfg["log_grid"] else np.linspace
    grid = space(cfg["r_min"], cfg["r_max"], int(cfg["points"]))
    rows = [{"R": r, "mu1": m} for r, m in circle.mu1_curve(cfg["beta"], grid)]
    write_csv(rows, out)
    return EXIT_OK


def _emit_predictions(preds, fmt, out, cone: bool):
    rows = []
    for p in preds:
        d = asdict(p)
        if cone:
            d = {k: d[k] for k in ("theta", "n", "cone_harmonic", "cone_upper", "cone_lower")}
        else:
            d = {k: d[k] for k in ("h", "n", "harmonic", "upper", "lower")}
        rows.append(d)
    if fmt == "json":
        write_json(rows, out)
    else:
        write_csv(rows, out)


def cmd_spectrum(cfg, out):
    thetas = [float(t) for t in _as_list(cfg["theta"])]
    n_max = int(cfg["n_max"])
    _require(all(0 < t < 0.5 * math.pi for t in thetas), "theta must lie in (0, pi/2)")
    _require(n_max >= 1, "n-max must be >= 1")
    _require(cfg["format"] in ("csv", "json"), "format must be csv or json")
    res = ordered_map(lambda t: effective.eigen_bounds(effective.build_problem(t, n_max), n_max), thetas)
    _emit_predictions([p for block in res for p in block], cfg["format"], out, cone=True)
    return EXIT_OK


def cmd_bounds(cfg, out):
    hs = [float(h) for h in _as_list(cfg["h"])]
    n_max = int(cfg["n_max"])
    _require(all(h > 0 for h in hs), "h must be positive")
    _require(n_max >= 1, "n-max must be >= 1")
    _require(cfg["format"] in ("csv", "json"), "format must be csv or json")
    res = ordered_map(lambda h: effective.eigen_bounds(effective.from_h(h, n_max), n_max), hs)
    _emit_predictions([p for block in res for p in block], cfg["format"], out, cone=False)
    return EXIT_OK


def cmd_count(cfg, out):
    h, theta, gamma, C = cfg["h"], cfg["theta"], float(cfg["gamma"]), float(cfg["C"])
    _require((h is None) != (theta is None), "give exactly one of --h or --theta")
    _require(C > 0, "C must be positive")
    if theta is not None:
        theta = float(theta)
        _require(0 < theta < 0.5 * math.pi, "theta must lie in (0, pi/2)")
        _require(0 < gamma < 1.5, "gamma must lie in (0, 3/2) for cone counting")
        count, pred = effective.counting_cone(theta, C, gamma)
        row = {"theta": theta, "gamma": gamma, "C": C, "count": count, "predicted": pred}
    else:
        h = float(h)
        _require(0 < h < 1, "h must lie in (0, 1)")
        _require(0 < gamma < 2, "gamma must lie in (0, 2) for 1D counting")
        count, pred = effective.count_reduced(h, C, gamma)
        row = {"h": h, "gamma": gamma, "C": C, "count": count, "predicted": pred}
    row["ratio"] = count / pred
    write_json(row, out)
    return EXIT_OK


def cmd_direct(cfg, out):
    _require(cfg["h"] > 0, "h must be positive")
    _require(1 <= int(cfg["k"]) <= 10, "k must lie in [1, 10]")
    try:
        grid = axisym.AxiGrid(r_max=cfg["r_max"], z_min=cfg["z_min"], z_max=cfg["z_max"], spacing=cfg["spacing"])
    except axisym.AssemblyError as exc:
        raise UsageError(str(exc)) from None
    op = axisym.assemble(cfg["h"], grid)
    vals, vecs, res = axisym.lowest_eigs(op, int(cfg["k"]), tol=cfg["tol"], seed=int(cfg["seed"]),
                                         return_vectors=True)
    zc, zs, rs = axisym.localization_profile(op, vecs[:, 0])
    write_json({
        "eigenvalues": vals.tolist(),
        "residuals": res.tolist(),
        "centroid": zc,
        "z_spread": zs,
        "r_spread": rs,
        "boundary_mass_fraction": axisym.boundary_mass_fraction(op, vecs[:, 0]),
        "ess_threshold": effective.ess_threshold(cfg["h"]),
        "grid": {"r_max": grid.r_max, "z_min": grid.z_min, "z_max": grid.z_max, "spacing": grid.spacing,
                 "nr": grid.nr, "nz": grid.nz, "unknowns": grid.size},
    }, out)
    return EXIT_OK


def cmd_verify(cfg, out):
    from . import checks

    suites = {"quick": report.QUICK_SUITE, "full": report.FULL_SUITE}
    _require(cfg["suite"] in suites, "suite must be quick or full")
    rep = checks.run_suite(suites[cfg["suite"]])
    out.write(rep.to_json(include_runtime=bool(cfg["timing"])))
    for line in rep.summary_lines():
        print(line, file=sys.stderr)
    return EXIT_OK if rep.overall else EXIT_FAIL


COMMANDS = {
    "constants": cmd_constants,
    "mu1": cmd_mu1,
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "count": cmd_count,
    "direct": cmd_direct,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat TOML file of defaults")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = _Parser(prog="conedelta", description="Spectra of delta-interactions on sharp cones.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("constants", parents=[common], help="print A, a0, a1, xi0 as JSON")

    s = sub.add_parser("mu1", parents=[common], help="CSV of the circle ground-state energy mu1(R)")
    s.add_argument("--beta", type=float)
    s.add_argument("--r-min", dest="r_min", type=float)
    s.add_argument("--r-max", dest="r_max", type=float)
    s.add_argument("--points", type=int)
    s.add_argument("--log-grid", dest="log_grid", action="store_true", default=None)

    for name, key, helptext in (("spectrum", "theta", "cone eigenvalue estimates"),
                                ("bounds", "h", "reduced-operator eigenvalue bounds")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument(f"--{key}", type=float, nargs="+")
        s.add_argument("--n-max", dest="n_max", type=int)
        s.add_argument("--format", choices=("csv", "json"))

    s = sub.add_parser("count", parents=[common], help="eigenvalue count against the log-Weyl prediction")
    s.add_argument("--h", type=float)
    s.add_argument("--theta", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--C", type=float)

    s = sub.add_parser("direct", parents=[common], help="direct axisymmetric solve as JSON")
    for flag, typ in (("h", float), ("spacing", float), ("r-max", float), ("z-min", float),
                      ("z-max", float), ("k", int), ("seed", int), ("tol", float)):
        s.add_argument(f"--{flag}", dest=flag.replace("-", "_"), type=typ)

    s = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    s.add_argument("--suite", choices=("quick", "full"))
    s.add_argument("--no-timing", dest="timing", action="store_false", default=None,
                   help="omit runtimes so the report is byte-stable")
    return p


def _error(kind: str, msg: str):
    print(json.dumps({"error": kind, "message": msg}), file=sys.stderr)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve(args.command, args, load_config(args.config))
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as out:
                return COMMANDS[args.command](cfg, out)
        return COMMANDS[args.command](cfg, sys.stdout)
    except UsageError as exc:
        _error("usage", str(exc))
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        _error("numerical", f"{type(exc).__name__}: {exc}")
        return EXIT_NUMERIC
    except ValueError as exc:
        _error("usage", str(exc))
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
