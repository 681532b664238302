#!/usr/bin/env python3
"""Run a named experiment preset and write its report/CSV artifacts.

Usage:
    python scripts/run_preset.py coherent_z --out results --threads 4
    python scripts/run_preset.py overrotation --exact
    python scripts/run_preset.py --list
"""

import argparse
import sys

from twirlbench import cli, presets


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("preset", nargs="?", help="preset name (see --list)")
    ap.add_argument("--list", action="store_true", help="list available presets")
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--exact", action="store_true", help="noiseless-statistics mode")
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args(argv)

    if args.list or args.preset is None:
        for name in presets.preset_names():
            print(name)
        return 0

    cmd = ["run", args.preset]
    if args.out:
        cmd += ["--out", args.out]
    if args.exact:
        cmd += ["--exact"]
    if args.threads:
        cmd += ["--threads", str(args.threads)]
    return cli.main(cmd)


if __name__ == "__main__":
    sys.exit(main())
