"""Optimal control of a parabolic equation with a nonlocal (integral) reaction term."""

from nonlocal_ocp.grid import Grid, build_grid, integrate, laplacian_apply, omega_indicator
from nonlocal_ocp.reaction import ReactionFunction, ValidationReport, validate
from nonlocal_ocp.linsolve import LocalOperator, RankOneCoupling, SingularUpdate, solve_local, solve_rank_one
from nonlocal_ocp.state import (
    PicardDiverged,
    ProblemSpec,
    Trajectory,
    assemble_F,
    solve_general_linear,
    solve_linearized,
    solve_second_linearization,
    solve_state,
)
from nonlocal_ocp.adjoint import solve_adjoint
from nonlocal_ocp.objective import CostBreakdown, cost, gradient, hessian_bilinear
from nonlocal_ocp.optimizer import (
    OptimizeReport,
    critical_cone_sample,
    kkt_residual,
    project_box,
    projected_gradient,
    ssc_check,
)

__all__ = [
    "Grid", "build_grid", "integrate", "laplacian_apply", "omega_indicator",
    "ReactionFunction", "ValidationReport", "validate",
    "LocalOperator", "RankOneCoupling", "SingularUpdate", "solve_local", "solve_rank_one",
    "PicardDiverged", "ProblemSpec", "Trajectory", "assemble_F", "solve_general_linear",
    "solve_linearized", "solve_second_linearization", "solve_state",
    "solve_adjoint",
    "CostBreakdown", "cost", "gradient", "hessian_bilinear",
    "OptimizeReport", "critical_cone_sample", "kkt_residual", "project_box",
    "projected_gradient", "ssc_check",
]
