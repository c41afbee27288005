"""Command-line entry points: solve, optimize, check, verify, sweep.

Exit codes: 0 ok, 1 configuration error, 2 solver failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from nonlocal_ocp import io
from nonlocal_ocp.adjoint import solve_adjoint
from nonlocal_ocp.config import ConfigError, build_problem, load, opt_settings
from nonlocal_ocp.linsolve import SingularUpdate
from nonlocal_ocp.objective import cost_of_state
from nonlocal_ocp.optimizer import (
    critical_cone_sample,
    kkt_residual,
    project_box,
    projected_gradient,
    ssc_check,
)
from nonlocal_ocp.state import PicardDiverged, solve_state
from nonlocal_ocp.verify import verification_suite

log = logging.getLogger("nonlocal_ocp")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3


def _initial_control(p, s):
    return project_box(p.control(s.u0), p.alpha, p.beta)


def cmd_solve(p, s, out: Path, args) -> int:
    u = _initial_control(p, s)
    y = solve_state(p, u)
    q = solve_adjoint(p, y)
    io.write_trajectory_csv(out / "state.csv", p, y)
    io.write_trajectory_csv(out / "adjoint.csv", p, q)
    io.write_json(out / "cost.json", cost_of_state(p, y, u).as_dict())
    return EXIT_OK


def _optimize(p, s):
    u, rep = projected_gradient(p, _initial_control(p, s), tol=s.tol, max_iters=s.max_iters)
    y = solve_state(p, u)
    q = solve_adjoint(p, y)
    dirs = critical_cone_sample(p, u, q, 20, s.seed)
    rep.ssc_min_curvature = ssc_check(p, u, dirs, y=y, q=q)
    if not dirs:
        rep.notes.append("critical cone sampled as {0}; curvature check vacuous")
    return u, rep


def cmd_optimize(p, s, out: Path, args) -> int:
    u, rep = _optimize(p, s)
    io.write_json(out / "report.json", rep.as_dict())
    io.write_control_csv(out / "control.csv", p, u)
    io.write_cost_history_csv(out / "cost_history.csv", rep)
    if not rep.converged:
        print(f"optimizer did not converge: {'; '.join(rep.notes)}", file=sys.stderr)
    return EXIT_OK


def cmd_check(p, s, out: Path, args) -> int:
    if args.control is None:
        raise ConfigError("check needs --control PATH (a CSV written by `optimize`)")
    try:
        u = io.read_control_csv(args.control, p)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    kkt = kkt_residual(p, u, 20, s.seed)
    y = solve_state(p, u)
    q = solve_adjoint(p, y)
    dirs = critical_cone_sample(p, u, q, 20, s.seed)
    curv = ssc_check(p, u, dirs, y=y, q=q)
    passed = kkt.residual <= 10 * s.tol
    io.write_json(out / "check.json", {
        "kkt_residual": kkt.residual,
        "variational_inequality_min": kkt.vi_min,
        "ssc_min_curvature": curv,
        "cone_directions": len(dirs),
        "passed": passed,
    })
    if not passed:
        print(f"KKT residual {kkt.residual:.3e} exceeds 10 x tol = {10 * s.tol:.1e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(p, s, out: Path, args) -> int:
    checks = verification_suite(p, tol=s.tol, max_iters=s.max_iters, seed=s.seed)
    failed = [c["name"] for c in checks if not c["passed"]]
    io.write_json(out / "verification.json", {"passed": not failed, "checks": checks})
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}")
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_sweep(p, s, out: Path, args) -> int:
    rows = []
    for i, mu in enumerate(s.mu_values):
        pm = p.replace(mu=mu)
        u, rep = _optimize(pm, s)
        io.write_json(out / f"report_mu_{i}.json", {"mu": mu, **rep.as_dict()})
        kkt = kkt_residual(pm, u, 20, s.seed)
        c = rep.final_cost
        rows.append((io.fmt(mu), io.fmt(c.tracking), io.fmt(c.regularization), io.fmt(kkt.residual)))
    io.write_rows(out / "summary.csv", ("mu", "tracking", "regularization", "kkt_residual"), rows)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "optimize": cmd_optimize,
    "check": cmd_check,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def run(subcommand: str, config_path=None, out_dir=".", control=None) -> int:
    args = argparse.Namespace(control=control)
    try:
        cp = load(config_path)
        p = build_problem(cp)
        s = opt_settings(cp)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[subcommand](p, s, out, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PicardDiverged, SingularUpdate, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nonlocal-ocp", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("-c", "--config", default=None,
                        help="INI config file (default: the packaged default instance)")
    parser.add_argument("-o", "--out", default=".", help="output directory")
    parser.add_argument("--control", default=None, help="control CSV for `check`")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    return run(args.subcommand, args.config, args.out, args.control)


if __name__ == "__main__":
    sys.exit(main())
