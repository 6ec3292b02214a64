"""Command-line front door: compute, verify, export, plot.

Outputs are files only (CSV for tables, JSON for reports, SVG for plots);
every JSON payload embeds the resolved run configuration so a run is
reproducible from its output. Exit codes: 0 success, 1 verification or
size failure, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import bounds as bd
from . import exactdist as ed
from . import limitmgf as lm
from . import sampler as sp
from .specfun import NoSolutionError, mu
from .verify import SUITE_NAMES, VerifyContext, run_suite

WORKERS_ENV = "QUICKSORT_TAILS_WORKERS"


class InputDataError(Exception):
    """Malformed user-supplied file; maps to exit code 2."""


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class RunConfig:
    """Resolved command + options; serialized into every JSON output."""
    command: str
    options: dict

    def to_dict(self) -> dict:
        return {"command": self.command, "options": dict(self.options),
                "package": __version__, "numpy": np.__version__}


def _resolve(args: argparse.Namespace, config: dict, defaults: dict) -> dict:
    """Flag > config file > built-in default, per option."""
    out = {}
    for key, builtin in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in config:
            out[key] = type(builtin)(config[key]) if builtin is not None else config[key]
        else:
            out[key] = builtin
    return out


def _write_json(path, payload: dict, run: RunConfig) -> None:
    payload = dict(payload)
    payload.setdefault("schemaVersion", 1)
    payload["config"] = run.to_dict()
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ------------------------------------------------------------- commands

_EXACT_DEFAULTS = {"mode": "rational", "cap": None, "out_dir": "."}


def cmd_exact(args, config) -> int:
    opts = _resolve(args, config, {"n": None, **_EXACT_DEFAULTS})
    n, mode = opts["n"], opts["mode"]
    run = RunConfig("exact", opts)
    try:
        pmf = ed.exact_pmf(n, mode, cap=opts["cap"])
    except ed.PmfSizeError as exc:
        print(f"exact: {exc}", file=sys.stderr)
        return 1
    os.makedirs(opts["out_dir"], exist_ok=True)
    csv_path = os.path.join(opts["out_dir"], f"pmf_n{n}_{mode}.csv")
    json_path = os.path.join(opts["out_dir"], f"exact_n{n}_{mode}.json")
    ed.write_pmf_csv(pmf, csv_path)
    mean = pmf.mean()
    mu_n = mu(n, "exact" if mode == "rational" else "float")
    summary = {
        "n": n,
        "mode": mode,
        "mean": str(mean) if mode == "rational" else mean,
        "meanFloat": float(mean),
        "mu": str(mu_n) if mode == "rational" else mu_n,
        "meanMatchesMu": mean == mu_n if mode == "rational"
        else abs(mean - mu_n) <= 1e-9 * max(1.0, abs(mu_n)),
        "variance": float(pmf.variance()),
        "supportMin": pmf.offset,
        "supportMax": pmf.support_max,
    }
    if n >= 1:
        ex = ed.extremes(n)
        summary["extremes"] = {
            "maxVal": ex.max_val, "maxProb": str(ex.max_prob),
            "minVal": ex.min_val, "lambda": ex.lambda_n,
            "minProb": None if ex.min_prob is None else str(ex.min_prob),
            "sigma": ex.sigma_n,
        }
    _write_json(json_path, summary, run)
    print(f"wrote {csv_path} and {json_path}")
    return 0


_SAMPLE_DEFAULTS = {"reps": 10_000, "seed": 0, "thresholds": [],
                    "workers": None, "out": "samples.csv"}


def cmd_sample(args, config) -> int:
    opts = _resolve(args, config, {"n": None, **_SAMPLE_DEFAULTS})
    if opts["workers"] is None:
        opts["workers"] = _default_workers()
    batch = sp.sample_batch(opts["n"], opts["reps"], seed=opts["seed"],
                            thresholds=opts["thresholds"],
                            workers=opts["workers"])
    sp.write_batches_csv([batch], opts["out"])
    print(f"wrote {opts['out']}")
    return 0


_PSI_DEFAULTS = {"t_max": 12.0, "grid": 256, "tol": 1e-9, "max_iter": 60,
                 "out_csv": "psi.csv", "out_json": "psi.json"}


def cmd_psi(args, config) -> int:
    opts = _resolve(args, config, _PSI_DEFAULTS)
    run = RunConfig("psi", opts)
    table = lm.fixpoint_psi(t_max=opts["t_max"], grid_size=opts["grid"],
                            tol=opts["tol"], max_iter=opts["max_iter"])
    lm.write_mgf_csv(table, opts["out_csv"])
    _write_json(opts["out_json"], lm.table_record(table), run)
    print(f"wrote {opts['out_csv']} and {opts['out_json']}"
          + ("" if table.converged else "  [WARNING: not converged]"))
    return 0 if table.converged else 1


_BOUNDS_DEFAULTS = {"slack_a": 0.0, "slack_c": 0.0, "slack_cap": 0.0,
                    "k": 1, "c_lower": 0.0, "c_upper": 0.0,
                    "out": "bounds.json", "out_csv": None}


def cmd_bounds(args, config) -> int:
    opts = _resolve(args, config, {"x": None, **_BOUNDS_DEFAULTS})
    run = RunConfig("bounds", opts)
    try:
        reports = [bd.build_report(x, a=opts["slack_a"], c=opts["slack_c"],
                                   C=opts["slack_cap"], k=opts["k"],
                                   c_lower=opts["c_lower"],
                                   c_upper=opts["c_upper"])
                   for x in opts["x"]]
    except (ValueError, NoSolutionError) as exc:
        print(f"bounds: {exc}", file=sys.stderr)
        return 1
    payload = json.loads(bd.reports_to_json(reports))
    _write_json(opts["out"], payload, run)
    if opts["out_csv"]:
        keys = list(reports[0].exponents)
        with open(opts["out_csv"], "w") as fh:
            fh.write("x," + ",".join(keys) + "\n")
            for r in reports:
                cells = ["" if r.exponents[k] is None else repr(r.exponents[k])
                         for k in keys]
                fh.write(f"{r.x!r}," + ",".join(cells) + "\n")
    print(f"wrote {opts['out']}")
    return 0


_VERIFY_DEFAULTS = {"reps": 1_000_000, "seed": 20260810, "workers": None,
                    "out": "verify_report.json"}


def cmd_verify(args, config) -> int:
    opts = _resolve(args, config, {"suite": None, **_VERIFY_DEFAULTS})
    if opts["workers"] is None:
        opts["workers"] = _default_workers()
    run = RunConfig("verify", opts)
    ctx = VerifyContext(mc_reps=opts["reps"], mc_seed=opts["seed"],
                        workers=opts["workers"])
    report = run_suite(opts["suite"], ctx)
    for chk in report.checks:
        print(f"{'PASS' if chk.passed else 'FAIL'}  {chk.check_id}: {chk.claim}")
    _write_json(opts["out"], report.to_dict(), run)
    print(f"wrote {opts['out']}; suite {'PASSED' if report.passed else 'FAILED'}")
    return 0 if report.passed else 1


_PLOT_DEFAULTS = {"out": "plot.svg", "x_label": None, "y_label": None}


def _read_series_csv(path):
    """Header row then numeric rows; first column is the abscissa."""
    import csv

    with open(path) as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise InputDataError(f"{path}:1: empty file")
    header = rows[0]
    if len(header) < 2:
        raise InputDataError(f"{path}:1: need at least two columns")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            data.append([float(c) if c != "" else math.nan for c in row])
        except ValueError as exc:
            raise InputDataError(f"{path}:{lineno}: {exc}") from None
        if len(row) != len(header):
            raise InputDataError(
                f"{path}:{lineno}: {len(row)} cells, header has {len(header)}")
    return header, np.array(data, dtype=float) if data else np.empty((0, len(header)))


def cmd_plot(args, config) -> int:
    opts = _resolve(args, config, {"inputs": [], **_PLOT_DEFAULTS})
    import matplotlib
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "quicksort-tails"  # stable ids
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    try:
        for path in opts["inputs"]:
            header, data = _read_series_csv(path)
            for j in range(1, len(header)):
                label = header[j] if len(opts["inputs"]) == 1 \
                    else f"{os.path.basename(path)}:{header[j]}"
                if data.size:
                    ax.plot(data[:, 0], data[:, j], label=label)
        if opts["inputs"]:
            ax.legend(loc="best", fontsize=8)
            header0, _ = _read_series_csv(opts["inputs"][0])
            ax.set_xlabel(opts["x_label"] or header0[0])
            if opts["y_label"]:
                ax.set_ylabel(opts["y_label"])
    except InputDataError as exc:
        print(f"plot: {exc}", file=sys.stderr)
        plt.close(fig)
        return 2
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(opts["out"], format="svg", metadata={"Date": None})
    plt.close(fig)
    print(f"wrote {opts['out']}")
    return 0


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="quicksort-tails",
        description="Exact distributions, limiting-MGF numerics, and tail "
                    "bounds for QuickSort comparison counts.")
    p.add_argument("--config", help="JSON file of option defaults "
                                    "(flags override)")
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("exact", help="exact PMF to CSV + summary JSON")
    pe.add_argument("--n", type=int, required=True)
    pe.add_argument("--mode", choices=("rational", "float"))
    pe.add_argument("--cap", type=int)
    pe.add_argument("--out-dir", dest="out_dir")
    pe.set_defaults(func=cmd_exact)

    ps = sub.add_parser("sample", help="Monte Carlo batch to CSV")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--reps", type=int)
    ps.add_argument("--seed", type=int)
    ps.add_argument("--thresholds", type=float, nargs="*")
    ps.add_argument("--workers", type=int)
    ps.add_argument("--out")
    ps.set_defaults(func=cmd_sample)

    pp = sub.add_parser("psi", help="fixed-point ln psi table to CSV + JSON")
    pp.add_argument("--t-max", dest="t_max", type=float)
    pp.add_argument("--grid", type=int)
    pp.add_argument("--tol", type=float)
    pp.add_argument("--max-iter", dest="max_iter", type=int)
    pp.add_argument("--out-csv", dest="out_csv")
    pp.add_argument("--out-json", dest="out_json")
    pp.set_defaults(func=cmd_psi)

    pb = sub.add_parser("bounds", help="bound exponents to JSON (+ CSV)")
    pb.add_argument("--x", type=float, nargs="+", required=True)
    pb.add_argument("--slack-a", dest="slack_a", type=float)
    pb.add_argument("--slack-c", dest="slack_c", type=float)
    pb.add_argument("--slack-C", dest="slack_cap", type=float)
    pb.add_argument("--k", type=int)
    pb.add_argument("--c-lower", dest="c_lower", type=float)
    pb.add_argument("--c-upper", dest="c_upper", type=float)
    pb.add_argument("--out")
    pb.add_argument("--out-csv", dest="out_csv")
    pb.set_defaults(func=cmd_bounds)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("--suite", choices=SUITE_NAMES, required=True)
    pv.add_argument("--reps", type=int)
    pv.add_argument("--seed", type=int)
    pv.add_argument("--workers", type=int)
    pv.add_argument("--out")
    pv.set_defaults(func=cmd_verify)

    pl = sub.add_parser("plot", help="line chart (SVG) from series CSVs")
    pl.add_argument("inputs", nargs="*")
    pl.add_argument("--out")
    pl.add_argument("--x-label", dest="x_label")
    pl.add_argument("--y-label", dest="y_label")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
            if not isinstance(config, dict):
                raise InputDataError(f"{args.config}: expected a JSON object")
        except (OSError, json.JSONDecodeError, InputDataError) as exc:
            print(f"config: {exc}", file=sys.stderr)
            return 2
    try:
        return args.func(args, config)
    except InputDataError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except NoSolutionError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
