"""Optimise the packaged default instance and print a short summary."""

import argparse

from nonlocal_ocp import critical_cone_sample, kkt_residual, projected_gradient, solve_adjoint, solve_state, ssc_check
from nonlocal_ocp.config import build_problem, load, opt_settings


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-c", "--config", default=None)
    args = ap.parse_args()
    cp = load(args.config)
    p, s = build_problem(cp), opt_settings(cp)
    u, rep = projected_gradient(p, p.control(s.u0), tol=s.tol, max_iters=s.max_iters)
    y = solve_state(p, u)
    q = solve_adjoint(p, y)
    kkt = kkt_residual(p, u, 20, s.seed)
    curv = ssc_check(p, u, critical_cone_sample(p, u, q, 50, s.seed), y=y, q=q)
    print(f"converged          {rep.converged} after {rep.iterates} iterations")
    print(f"cost               {rep.final_cost.total:.10g} "
          f"(tracking {rep.final_cost.tracking:.6g}, regularization {rep.final_cost.regularization:.6g})")
    print(f"active at alpha    {rep.fraction_at_alpha:.3f}")
    print(f"active at beta     {rep.fraction_at_beta:.3f}")
    print(f"projection resid.  {kkt.residual:.3e}")
    print(f"min VI sample      {kkt.vi_min:.3e}")
    print(f"min cone curvature {curv:.4f}")


if __name__ == "__main__":
    main()
