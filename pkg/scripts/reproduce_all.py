#!/usr/bin/env python3
"""Reproduce the headline numerical demonstrations in one pass.

Runs, in order:
  1. coherent_z               — fixed e^{i(theta/2)ZZ} error, all four twirls
  2. overrotation             — CNOT^(1+delta) / X90^(1+delta) pulse errors
  3. adversarial              — destructive +-YY interference (negative estimate)
  4. adversarial_constructive — the opposite sign (inflated estimate)
  5. xrb_comparison           — XRB (unitarity) bounds vs systematic bounds
  6. scg_comparison           — self-consistent-gauge infidelity per twirl group

Each preset writes report.json, decay CSVs, and plot_data.csv under
<out>/<preset name>/.  Expect roughly 10-20 minutes total with --threads 4.

Usage:
    python scripts/reproduce_all.py --out results --threads 4
"""

import argparse
import sys
import time

from twirlbench import cli

ORDER = [
    "coherent_z",
    "overrotation",
    "adversarial",
    "adversarial_constructive",
    "xrb_comparison",
    "scg_comparison",
]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--exact", action="store_true",
                    help="noiseless statistics (no shot sampling)")
    args = ap.parse_args(argv)

    for name in ORDER:
        cmd = ["run", name, "--out", args.out, "--threads", str(args.threads)]
        if args.exact:
            cmd.append("--exact")
        t0 = time.time()
        print(f"=== {name} ===", flush=True)
        code = cli.main(cmd)
        if code != 0:
            print(f"{name} failed with exit code {code}", file=sys.stderr)
            return code
        print(f"=== {name} done in {time.time() - t0:.0f}s ===", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
