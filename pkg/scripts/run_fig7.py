#!/usr/bin/env python3
"""Throughput versus MCS across IF slots, with and without a co-channel
occupant on an adjacent pair (fig7 preset)."""

import argparse
import sys

from rocsim.cli import run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig7")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    return run("throughput", "fig7", out_dir=args.out, seed=args.seed)


if __name__ == "__main__":
    sys.exit(main())
