#!/usr/bin/env python3
"""Emit the canned figure datasets (CSV) into ./out.

Each dataset corresponds to one preset of the CLI:
  figure3/4/5 - groove profiles at increasing annealing times
  figure6     - groove depth vs time for a sweep of coating stiffnesses
  cornerfig   - corner-layer similarity solutions and their combination
"""

import pathlib
import sys

from gbgroove.cli import main

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"


def run() -> int:
    OUT.mkdir(exist_ok=True)
    for preset in ("figure3", "figure4", "figure5", "figure6", "cornerfig"):
        out = OUT / f"{preset}.csv"
        code = main(["--preset", preset, "--samples", "400", "--out", str(out)])
        if code != 0:
            return code
        print(f"  {preset}: {out}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
