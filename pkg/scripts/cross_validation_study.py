#!/usr/bin/env python3
"""Composite expansion vs finite-difference solution across stiffnesses.

Quantifies the sup-norm gap between the two routes as a function of
alpha_hat and fits its scaling exponent.  The gap follows
~0.022 alpha_hat^(3/2): the wall correction deposits an uncompensated
O(alpha_hat^{3/2}) mass, which is the accuracy floor of the expansion.
"""

import math
import sys

import numpy as np

from gbgroove.composite import ExpansionSpec, composite_profile_nd
from gbgroove.oracle import Grid, SolverConfig, solve

M = 0.209


def gap_at(alpha_hat: float, nx: int = 513, dt: float = 1.0 / 512) -> float:
    cfg = SolverConfig(grid=Grid(L=8.0, nx=nx), dt=dt, t_final=1.0,
                       alpha_hat=alpha_hat, m=M, theta=1.0)
    prof = solve(cfg)[-1]
    spec = ExpansionSpec(N=2)
    comp = np.array([composite_profile_nd(float(u), 1.0, M, alpha_hat, spec)
                     for u in cfg.grid.nodes])
    return float(np.max(np.abs(prof.heights - comp)) / abs(comp[0]))


def run() -> int:
    hats = np.array([0.05, 0.1, 0.15, 0.2, 0.30674093303633276])
    gaps = []
    print("alpha_hat   sup|fd-composite|/depth")
    for ah in hats:
        g = gap_at(float(ah))
        gaps.append(g)
        print(f"  {ah:8.4f}   {g:10.4%}")
    slope, intercept = np.polyfit(np.log(hats), np.log(gaps), 1)
    crossover = math.exp((math.log(0.02) - intercept) / slope)
    print(f"fitted scaling exponent: {slope:.3f}  (wall-mass defect ~ 3/2)")
    print(f"2%-of-depth gate satisfied up to alpha_hat ~ {crossover:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
