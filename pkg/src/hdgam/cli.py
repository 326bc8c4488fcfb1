"""Command-line entry point: ``hdgam {fit,simulate,cv,make-fixture}``.

Every flag can also be supplied through ``--config FILE.json`` (keys are the
long flag names, dashes or underscores both accepted); flags given on the
command line win. Exit codes: 0 success, 1 pipeline error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bands import build_bands
from .cv import cross_validate_df
from .data import load_csv, synthetic_housing, write_csv
from .errors import HdgamError, InvalidConfigurationError
from .lasso import PenaltyConfig
from .orthogonal import build_design, estimate_covariance, fit_nuisance, solve_theta
from .simulate import DgpConfig, run_monte_carlo

EXIT_OK, EXIT_PIPELINE, EXIT_USAGE = 0, 1, 2
BAND_COLUMNS = ("x", "f1_hat", "lower", "upper", "sigma_x")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _dump(obj, path: Path | None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def _int_list(text: str) -> list[int]:
    parts = [s.strip() for s in str(text).split(",") if s.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("grid must list at least one integer")
    try:
        return [int(s) for s in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _components(text: str) -> list[int]:
    text = str(text).strip()
    if ".." in text:
        a, _, b = text.partition("..")
        try:
            lo, hi = int(a), int(b)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad component range {text!r}") from None
        if lo > hi:
            raise argparse.ArgumentTypeError(f"empty component range {text!r}")
        return list(range(lo, hi + 1))
    return _int_list(text)


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


# ---------------------------------------------------------------- fit


def write_band_csv(band, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BAND_COLUMNS)
        for row in zip(band.grid, band.f1_hat, band.lower, band.upper, band.sigma_x):
            w.writerow([_fmt(v) for v in row])


def read_band_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != BAND_COLUMNS:
        raise ValueError(f"unexpected band header {rows[0]}")
    arr = np.array(rows[1:], dtype=float)
    return {name: arr[:, k] for k, name in enumerate(BAND_COLUMNS)}


def _out_paths(out: str | None, stem: str) -> tuple[Path, Path]:
    base = Path(out) if out else Path(stem)
    if base.suffix.lower() in (".csv", ".json"):
        base = base.with_suffix("")
    return base.with_suffix(".csv"), base.with_suffix(".json")


def cmd_fit(args) -> int:
    table = load_csv(args.data, args.target)
    y, x1, xo, others = table.split(args.target, args.component)
    lo, hi = args.interval if args.interval else (float(x1.min()), float(x1.max()))
    penalty = PenaltyConfig(c_lambda=args.c_lambda)
    design = build_design(x1, xo, y, args.df_own, args.df_other, args.degree)
    nuisance = fit_nuisance(design, penalty)
    theta = solve_theta(design, nuisance)
    model = estimate_covariance(design, nuisance, theta)
    band = build_bands(
        model, lo, hi, grid_size=args.grid, alpha=args.alpha, B=args.bootstrap,
        seed=args.seed, threads=args.threads,
    )
    csv_path, json_path = _out_paths(args.out, f"{args.component}_band")
    write_band_csv(band, csv_path)
    summary = {
        "command": "fit",
        "version": __version__,
        "n": design.n,
        "d1": design.d1,
        "d2": design.d2,
        "theta_hat": [float(v) for v in model.theta_hat],
        "c_alpha": band.c_alpha,
        "score_gap": float(model.score_gap),
        "lambda": {
            "outcome": float(nuisance.outcome_fit.lam),
            "auxiliary": [float(f.lam) for f in nuisance.auxiliary_fits],
        },
        "support_size": {
            "outcome": int(nuisance.outcome_fit.support.size),
            "auxiliary": [int(f.support.size) for f in nuisance.auxiliary_fits],
        },
        "mean_width": band.mean_width,
        "band_csv": str(csv_path),
        "config": {
            "data": str(args.data),
            "target": args.target,
            "component": args.component,
            "other_columns": others,
            "df_own": args.df_own,
            "df_other": args.df_other,
            "degree": args.degree,
            "alpha": args.alpha,
            "grid": args.grid,
            "interval": [float(lo), float(hi)],
            "bootstrap": args.bootstrap,
            "seed": args.seed,
            "c_lambda": args.c_lambda,
        },
    }
    _dump(summary, json_path)
    print(f"theta_hat ({design.d1} coefs), c_alpha={band.c_alpha:.4f}, mean width={band.mean_width:.4f}")
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


# ----------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    config = DgpConfig(n=args.n, p=args.p, seed=args.seed)
    report = run_monte_carlo(
        config,
        R=args.reps,
        components=args.components,
        df_own=args.df_own,
        df_other=args.df_other,
        alpha=args.alpha,
        B=args.bootstrap,
        interval=tuple(args.interval),
        grid_size=args.grid,
        penalty=PenaltyConfig(c_lambda=args.c_lambda),
        threads=args.threads,
    )
    doc = {"command": "simulate", "version": __version__, **report.to_dict()}
    _dump(doc, Path(args.out) if args.out else None)
    print(report.table())
    if args.out:
        print(f"wrote {args.out}")
    return EXIT_OK


# ----------------------------------------------------------------- cv


def cmd_cv(args) -> int:
    table = load_csv(args.data, args.target)
    result = cross_validate_df(
        table, args.target, args.component, args.own_grid, args.other_grid,
        folds=args.folds, seed=args.seed, degree=args.degree,
        config=PenaltyConfig(c_lambda=args.c_lambda),
    )
    doc = {"command": "cv", "version": __version__, **result.to_dict()}
    _dump(doc, Path(args.out) if args.out else None)
    print(f"{args.component}: k* = {result.chosen_own} (other df {result.chosen_other})")
    if result.failed:
        print(f"{len(result.failed)} pair(s) failed and were excluded", file=sys.stderr)
    return EXIT_OK


def cmd_make_fixture(args) -> int:
    table = synthetic_housing(n=args.rows, seed=args.seed)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_csv(table, path)
    print(f"wrote {table.n} rows x {len(table.columns)} columns to {path}")
    return EXIT_OK


# ------------------------------------------------------------- parser

# flags whose absence after merging the config file is a usage error
REQUIRED = {
    "fit": ("data", "target", "component", "df_own", "df_other"),
    "simulate": ("n", "p", "reps"),
    "cv": ("data", "target", "component", "own_grid", "other_grid"),
    "make-fixture": ("out",),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdgam", description="Simultaneous bands for one additive component.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--config", help="JSON file with default values for any flag")
        p.add_argument("--seed", type=_seed, default=seed_default)
        p.add_argument("--out")
        p.add_argument("--c-lambda", type=float, default=1.1, help="penalty multiplier (default 1.1)")

    p = sub.add_parser("fit", help="fit one component on a CSV file and write its band")
    common(p)
    p.add_argument("--data")
    p.add_argument("--target")
    p.add_argument("--component")
    p.add_argument("--df-own", type=int)
    p.add_argument("--df-other", type=int)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--bootstrap", type=int, default=1000)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="Monte Carlo coverage study")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--df-own", type=int, help="default: published value for (n, p)")
    p.add_argument("--df-other", type=int, help="default: published value for (n, p)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--interval", type=float, nargs=2, default=[-2.0, 2.0], metavar=("LO", "HI"))
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--bootstrap", type=int, default=1000)
    p.add_argument("--components", type=_components, default=[1, 2, 3, 4, 5], help='e.g. "1..5" or "1,4"')
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cv", help="5-fold CV search over spline df")
    common(p)
    p.add_argument("--data")
    p.add_argument("--target")
    p.add_argument("--component")
    p.add_argument("--own-grid", type=_int_list)
    p.add_argument("--other-grid", type=_int_list)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--degree", type=int, default=3)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("make-fixture", help="write the synthetic housing-style CSV")
    p.add_argument("--config")
    p.add_argument("--out", default="boston_synthetic.csv")
    p.add_argument("--rows", type=int, default=506)
    p.add_argument("--seed", type=_seed, default=1978)
    p.set_defaults(func=cmd_make_fixture)
    return parser


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


def parse_args(argv=None) -> argparse.Namespace:
    """Parse flags, filling unspecified ones from ``--config`` if given."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sp = _subparser(parser, args.command)
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            sp.error(f"cannot read config file {args.config}: {exc}")
        if not isinstance(raw, dict):
            sp.error("config file must hold a JSON object")
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, value in raw.items():
            dest = key.lstrip("-").replace("-", "_")
            if dest not in known or dest in ("config", "help"):
                sp.error(f"unknown key {key!r} in config file")
            action = known[dest]
            if action.type is not None and isinstance(value, str):
                try:
                    value = action.type(value)
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    sp.error(f"config key {key!r}: {exc}")
            defaults[dest] = value
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    missing = [d for d in REQUIRED[args.command] if getattr(args, d, None) is None]
    if missing:
        flags = ", ".join("--" + d.replace("_", "-") for d in missing)
        _subparser(parser, args.command).error(f"missing required flag(s): {flags}")
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (HdgamError, InvalidConfigurationError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("row", "column", "quantile", "value", "point", "component", "kkt_gap"):
            v = getattr(exc, attr, None)
            if v is not None and v == v:
                err[attr] = v if isinstance(v, (int, str)) else float(v)
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return EXIT_PIPELINE


def main_exit() -> None:
    sys.exit(main())
