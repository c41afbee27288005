"""Reduced cost, its adjoint gradient and the Hessian bilinear form."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from nonlocal_ocp.adjoint import solve_adjoint
from nonlocal_ocp.state import (
    ProblemSpec,
    Trajectory,
    assemble_F,
    solve_linearized,
    solve_state,
)


@dataclass(frozen=True)
class CostBreakdown:
    tracking: float
    regularization: float

    @property
    def total(self) -> float:
        return self.tracking + self.regularization

    def as_dict(self) -> dict:
        return {**asdict(self), "total": self.total}


def inner_Q(p: ProblemSpec, a, b) -> float:
    """Space-time L2 product over levels 1..nt (right-endpoint rule)."""
    a = a.values if isinstance(a, Trajectory) else np.asarray(a)
    b = b.values if isinstance(b, Trajectory) else np.asarray(b)
    return p.tau * float(np.sum(a[1:] * b[1:] * p.grid.weights))


def inner_omega(p: ProblemSpec, u, v) -> float:
    """L2(omega x (0,T)) product of two (nt, n) control arrays."""
    return p.tau * float(np.sum(np.asarray(u) * np.asarray(v) * (p.chi * p.grid.weights)))


def norm_omega(p: ProblemSpec, u) -> float:
    return np.sqrt(inner_omega(p, u, u))


def cost_of_state(p: ProblemSpec, y: Trajectory, v) -> CostBreakdown:
    e = y.values - p.yd_levels
    return CostBreakdown(0.5 * inner_Q(p, e, e), 0.5 * p.mu * inner_omega(p, v, v))


def cost_change(p: ProblemSpec, y_new: Trajectory, v_new, y_old: Trajectory, v_old) -> float:
    """J(v_new) - J(v_old) from the two states, without subtracting two totals.

    Uses a^2 - b^2 = (a - b)(a + b) so the result keeps its relative accuracy
    when the two controls are close.
    """
    e_sum = y_new.values + y_old.values - 2 * p.yd_levels
    dy = y_new.values - y_old.values
    v_new, v_old = np.asarray(v_new), np.asarray(v_old)
    return 0.5 * inner_Q(p, dy, e_sum) + 0.5 * p.mu * inner_omega(p, v_new - v_old, v_new + v_old)


def cost(p: ProblemSpec, v) -> CostBreakdown:
    return cost_of_state(p, solve_state(p, v), v)


def gradient(p: ProblemSpec, v):
    """Riesz representative of the derivative in L2(omega_T).

    Returns ``(g, CostBreakdown, q)`` with g of shape (nt, n), zero off omega.
    """
    v = np.asarray(v, dtype=float)
    y = solve_state(p, v)
    q = solve_adjoint(p, y)
    g = p.chi * (q.values[:-1] + p.mu * v)
    return g, cost_of_state(p, y, v), q


def hessian_bilinear(p: ProblemSpec, u, v, w, *, y: Trajectory | None = None,
                     q: Trajectory | None = None) -> float:
    """J''(u)[v, w] = <F, q> + <z_v, z_w>_Q + mu <v, w>_omega.

    F at level m is paired with the multiplier q[m-1] that the adjoint step m
    produces, which keeps the form consistent with the discrete cost.
    """
    if y is None:
        y = solve_state(p, u)
    if q is None:
        q = solve_adjoint(p, y)
    zv = solve_linearized(p, y, v)
    zw = zv if w is v else solve_linearized(p, y, w)
    F = assemble_F(p, y, zv, zw)
    nonlocal_term = p.tau * float(np.sum(F[1:] * q.values[:-1] * p.grid.weights))
    return nonlocal_term + inner_Q(p, zv, zw) + p.mu * inner_omega(p, v, w)
