#!/usr/bin/env python3
"""Angle-sweep beamforming study on the packaged fig5 preset.

Runs the exhaustive mapping search and the sampled SINR sweep, leaving
optimize-mapping.csv and sinr-sweep.csv (plus JSON summaries) in --out.
"""

import argparse
import sys

from rocsim.cli import run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig5")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    for cmd in ("optimize-mapping", "sinr-sweep"):
        rc = run(cmd, "fig5", out_dir=args.out, seed=args.seed)
        if rc:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
