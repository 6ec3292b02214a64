#!/usr/bin/env python3
"""Run every verification suite and collect the reports under out/.

Equivalent to `quicksort-tails verify --suite all` plus per-suite JSON
files; handy when bisecting a regression to one suite.
"""

import argparse
import json
import pathlib
import sys
import time

from quicksort_tails.verify import SUITE_NAMES, VerifyContext, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--reps", type=int, default=1_000_000,
                    help="Monte Carlo replications for the ld suite")
    ap.add_argument("--seed", type=int, default=20260810)
    ap.add_argument("--workers", type=int, default=2)
    args = ap.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx = VerifyContext(mc_reps=args.reps, mc_seed=args.seed,
                        workers=args.workers)
    all_ok = True
    for suite in SUITE_NAMES:
        if suite == "all":
            continue
        t0 = time.monotonic()
        report = run_suite(suite, ctx)
        dt = time.monotonic() - t0
        path = out / f"verify_{suite}.json"
        path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        status = "ok" if report.passed else "FAILED"
        print(f"{suite:10s} {status:6s} {dt:6.1f}s -> {path}")
        all_ok &= report.passed
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
