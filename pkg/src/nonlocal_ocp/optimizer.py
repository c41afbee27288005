"""Box projection, projected-gradient descent and optimality checks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from nonlocal_ocp.adjoint import solve_adjoint
from nonlocal_ocp.objective import (
    CostBreakdown,
    cost_change,
    cost_of_state,
    gradient,
    hessian_bilinear,
    inner_omega,
    norm_omega,
)
from nonlocal_ocp.state import ProblemSpec, Trajectory, solve_state

log = logging.getLogger(__name__)

DELTA_ACT = 1e-8


def project_box(w, alpha: float, beta: float) -> np.ndarray:
    if not alpha < beta:
        raise ValueError(f"need alpha < beta, got [{alpha}, {beta}]")
    return np.minimum(np.maximum(np.asarray(w, dtype=float), alpha), beta)


@dataclass
class OptimizeReport:
    iterates: int
    final_cost: CostBreakdown
    residual_history: list[float]
    cost_history: list[CostBreakdown]
    accepted_decreases: list[float]
    fraction_at_alpha: float
    fraction_at_beta: float
    fraction_inactive: float
    converged: bool
    line_search_failed: bool = False
    ssc_min_curvature: float | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "iterates": self.iterates,
            "converged": self.converged,
            "line_search_failed": self.line_search_failed,
            "final_cost": self.final_cost.as_dict(),
            "final_residual": self.residual_history[-1] if self.residual_history else None,
            "active_fractions": {
                "alpha": self.fraction_at_alpha,
                "beta": self.fraction_at_beta,
                "inactive": self.fraction_inactive,
            },
            "ssc_min_curvature": self.ssc_min_curvature,
            "residual_history": list(self.residual_history),
            "notes": list(self.notes),
        }


def active_fractions(p: ProblemSpec, u) -> tuple[float, float, float]:
    mask = np.broadcast_to(p.chi > 0, np.shape(u))
    vals = np.asarray(u)[mask]
    if vals.size == 0:
        return 0.0, 0.0, 1.0
    lo = np.count_nonzero(vals == p.alpha) / vals.size
    hi = np.count_nonzero(vals == p.beta) / vals.size
    return lo, hi, 1.0 - lo - hi


def projected_gradient(p: ProblemSpec, u0, tol: float = 1e-6, max_iters: int = 500,
                       c1: float = 1e-4, max_halvings: int = 40):
    """Projected gradient with Armijo backtracking from unit step.

    Stops when ||u - P(u - g)||_{L2(omega_T)} <= tol. Non-convergence is
    reported, not raised.
    """
    alpha, beta = p.alpha, p.beta
    u = project_box(u0, alpha, beta)
    g, J, _ = gradient(p, u)
    y = solve_state(p, u)
    residuals, costs, decreases = [], [J], []
    converged = ls_failed = False
    notes = []
    k = 0
    while True:
        trial = project_box(u - g, alpha, beta)
        r = norm_omega(p, u - trial)
        residuals.append(r)
        if r <= tol:
            converged = True
            break
        if k >= max_iters:
            notes.append(f"iteration cap {max_iters} reached")
            break
        s = 1.0
        for _ in range(max_halvings + 1):
            if s != 1.0:
                trial = project_box(u - s * g, alpha, beta)
            y_trial = solve_state(p, trial)
            dJ = cost_change(p, y_trial, trial, y, u)
            if dJ <= c1 * inner_omega(p, g, trial - u):
                break
            s *= 0.5
        else:
            ls_failed = True
        if ls_failed or np.array_equal(trial, u):
            ls_failed = True
            notes.append(f"Armijo line search failed at iterate {k} (residual {r:.3e})")
            break
        u, y = trial, y_trial
        q = solve_adjoint(p, y)
        g = p.chi * (q.values[:-1] + p.mu * u)
        J = cost_of_state(p, y, u)
        costs.append(J)
        decreases.append(dJ)
        k += 1
    lo, hi, free = active_fractions(p, u)
    report = OptimizeReport(k, J, residuals, costs, decreases, lo, hi, free, converged, ls_failed, notes=notes)
    return u, report


@dataclass(frozen=True)
class KKTResult:
    residual: float
    vi_min: float


def kkt_residual(p: ProblemSpec, u, samples: int = 20, seed: int = 0) -> KKTResult:
    """Projection-formula residual and the worst sampled variational inequality value."""
    u = np.asarray(u, dtype=float)
    y = solve_state(p, u)
    q = solve_adjoint(p, y)
    qm = q.values[:-1]
    res = norm_omega(p, u - project_box(-qm / p.mu, p.alpha, p.beta))
    g = p.chi * (qm + p.mu * u)
    rng = np.random.default_rng(seed)
    vi = np.inf
    for i in range(samples):
        if i % 2:
            v = np.where(rng.random(u.shape) < 0.5, p.alpha, p.beta)
        else:
            v = rng.uniform(p.alpha, p.beta, u.shape)
        vi = min(vi, inner_omega(p, g, v - u))
    return KKTResult(res, vi)


def critical_cone_sample(p: ProblemSpec, u, q: Trajectory, count: int, seed=0,
                         delta_act: float = DELTA_ACT) -> list[np.ndarray]:
    """Random directions obeying the critical-cone sign pattern, unit L2(omega_T) norm.

    Returns an empty list when the cone is numerically {0}.
    """
    u = np.asarray(u, dtype=float)
    grad = q.values[:-1] + p.mu * u
    on_omega = np.broadcast_to(p.chi > 0, u.shape)
    free = on_omega & (np.abs(grad) <= delta_act)
    at_lo = u <= p.alpha + delta_act
    at_hi = u >= p.beta - delta_act
    if not free.any():
        return []
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.standard_normal(u.shape)
        v = np.where(at_lo, np.abs(v), v)
        v = np.where(at_hi, -np.abs(v), v)
        v = np.where(free, v, 0.0)
        nv = norm_omega(p, v)
        if nv > 0:
            out.append(v / nv)
    return out


def ssc_check(p: ProblemSpec, u, directions, *, y: Trajectory | None = None,
              q: Trajectory | None = None) -> float:
    """Minimum of J''(u)[v, v] over the given (normalised) directions."""
    if not directions:
        log.warning("ssc_check: empty direction set, returning +inf")
        return np.inf
    if y is None:
        y = solve_state(p, u)
    if q is None:
        q = solve_adjoint(p, y)
    return min(hessian_bilinear(p, u, v, v, y=y, q=q) for v in directions)
