"""Temporal and spatial convergence orders of the state solver."""

import numpy as np

from nonlocal_ocp import ProblemSpec, ReactionFunction, build_grid
from nonlocal_ocp.verify import spatial_order, temporal_order

LOGISTIC = ReactionFunction("logistic", 1.0, 3.0, 1.0)


def uniform(nt):
    g = build_grid(1.0, 5, (0.0, 1.0))
    return ProblemSpec(g, LOGISTIC, np.ones(5), np.zeros(5), 1.0, 1.0, nt, 0.0, 2.0)


def cosine(n):
    g = build_grid(1.0, n, (0.0, 1.0))
    return ProblemSpec(g, LOGISTIC, 1.0 + 0.5 * np.cos(np.pi * g.x), np.zeros(n), 1.0, 1.0, 50, 0.0, 2.0)


def main():
    nts = [100, 200, 400, 800, 1600]
    errs, slope = temporal_order(uniform(100), nts, lambda t: 1.0 + np.sin(2 * np.pi * t))
    print("time (vs RK4 oracle on uniform data)")
    for nt, e in zip(nts, errs):
        print(f"  nt={nt:5d}  max error {e:.3e}")
    print(f"  fitted order {slope:.3f}")
    ns = [26, 51, 101, 201, 401]
    errs, slope = spatial_order(cosine, ns, 1601)
    print("space (self-convergence against n=1601)")
    for n, e in zip(ns, errs):
        print(f"  n={n:5d}  max error {e:.3e}")
    print(f"  fitted order {slope:.3f}")


if __name__ == "__main__":
    main()
