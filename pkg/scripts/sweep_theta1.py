#!/usr/bin/env python3
"""Sweep the single-qubit coherent-error angle and tabulate bound widths.

Produces sweep_theta1_deg.csv: one row per angle, one column per twirl
group, each entry the systematic-bound width of the interleaved-CNOT
estimate in exact mode.  The widths shrink monotonically as theta1 -> 0.

Usage:
    python scripts/sweep_theta1.py --grid 0:2:0.25 --out results
"""

import argparse
import sys

from twirlbench import cli


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="0:2:0.25", help="start:stop:step in degrees")
    ap.add_argument("--out", default="results")
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args(argv)
    return cli.main([
        "sweep", "theta1_sweep", "--param", "theta1_deg", "--grid", args.grid,
        "--out", args.out, "--threads", str(args.threads),
    ])


if __name__ == "__main__":
    sys.exit(main())
