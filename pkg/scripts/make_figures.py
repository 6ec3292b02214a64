#!/usr/bin/env python3
"""Export the standard tables and render the two standard figures.

Produces, under out/:
  psi.csv / psi.svg            ln psi versus t from the fixed-point solve
  exponents.csv / exponents.svg  bound exponents versus the tail abscissa
"""

import argparse
import pathlib
import sys

import numpy as np

from quicksort_tails import bounds as bd
from quicksort_tails import limitmgf as lm
from quicksort_tails.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--t-max", type=float, default=12.0)
    ap.add_argument("--x-max", type=float, default=60.0)
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    table = lm.fixpoint_psi(t_max=args.t_max)
    lm.write_mgf_csv(table, out / "psi.csv")

    xs = np.linspace(2 * np.e, args.x_max, 80)
    with open(out / "exponents.csv", "w") as fh:
        fh.write("x,janson,xaUpper,newUpperF,ksConjF\n")
        for x in xs:
            x = float(x)
            fh.write(f"{x!r},{bd.janson_exponent(x)!r},"
                     f"{bd.xa_exponents(x).upper!r},"
                     f"{bd.new_upper_F(x)!r},"
                     f"{bd.ks_conjecture(x).ln_fbar!r}\n")

    rc = cli_main(["plot", str(out / "psi.csv"),
                   "--out", str(out / "psi.svg"), "--y-label", "ln psi"])
    rc |= cli_main(["plot", str(out / "exponents.csv"),
                    "--out", str(out / "exponents.svg"),
                    "--y-label", "ln tail bound"])
    return rc


if __name__ == "__main__":
    sys.exit(main())
