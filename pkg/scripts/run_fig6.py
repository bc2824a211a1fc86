#!/usr/bin/env python3
"""Link-metric power sweeps over the calibrated 50 m and 15 m presets.

Writes one evm-sweep.csv per cable length under --out/<preset>/.
"""

import argparse
import sys

from rocsim.cli import run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig6")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    for preset in ("fig6-50m", "fig6-15m"):
        rc = run("evm-sweep", preset, out_dir=f"{args.out}/{preset}", seed=args.seed)
        if rc:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
