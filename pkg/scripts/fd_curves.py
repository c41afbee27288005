"""Central-difference gradient error curves on the logistic and constant instances.

On the constant instance the reduced cost is quadratic, so the curve shows
round-off only and has no second-order branch.
"""

import numpy as np

from nonlocal_ocp import ReactionFunction
from nonlocal_ocp.config import build_problem, load
from nonlocal_ocp.verify import fd_gradient_check


def main():
    base = build_problem(load()).replace(picard_tol=1e-13)
    for label, p in (("logistic", base), ("constant", base.replace(reaction=ReactionFunction("constant", 1.0)))):
        rng = np.random.default_rng(0)
        u = rng.uniform(p.alpha, p.beta, (p.nt, p.grid.n))
        r = fd_gradient_check(p, u, p.chi * rng.standard_normal(u.shape))
        print(f"{label}: slope {r.slope}, min relative error {r.min_error:.2e}")
        for eps, err in zip(r.eps, r.errors):
            print(f"  eps={eps:.3e}  {err:.3e}")


if __name__ == "__main__":
    main()
