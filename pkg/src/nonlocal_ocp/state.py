"""Backward-Euler integration of the nonlocal state equation and its linearisations.

Time levels are t_m = m * tau, m = 0..nt. Controls and sources are piecewise
constant on (t_{m-1}, t_m] and stored as arrays of shape (nt, n), row m-1
holding the value used by step m. Trajectories are (nt+1, n).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from nonlocal_ocp.grid import Grid, integrate, laplacian_bands, omega_indicator
from nonlocal_ocp.linsolve import LocalOperator, RankOneCoupling, solve_local, solve_rank_one
from nonlocal_ocp.reaction import ReactionFunction

log = logging.getLogger(__name__)


class PicardDiverged(RuntimeError):
    def __init__(self, step: int, residual: float):
        self.step = step
        self.residual = residual
        super().__init__(f"Picard iteration did not converge at time level {step} "
                         f"(last residual {residual:.3e}) after exhausting sub-steps")


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    grid: Grid
    reaction: ReactionFunction
    y0: np.ndarray
    yd: np.ndarray  # (n,) broadcast in time, or (nt+1, n)
    mu: float
    T: float
    nt: int
    alpha: float
    beta: float
    picard_tol: float = 1e-10
    picard_maxit: int = 50
    max_halvings: int = 10

    def __post_init__(self):
        n = self.grid.n
        y0 = np.asarray(self.y0, dtype=float)
        yd = np.asarray(self.yd, dtype=float)
        if y0.shape != (n,):
            raise ValueError(f"y0 must have shape ({n},), got {y0.shape}")
        if yd.shape not in ((n,), (self.nt + 1, n)):
            raise ValueError(f"yd must have shape ({n},) or ({self.nt + 1}, {n}), got {yd.shape}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if int(self.nt) != self.nt or self.nt < 1:
            raise ValueError(f"nt must be a positive integer, got {self.nt}")
        if self.picard_tol < 0 or self.picard_maxit < 1 or self.max_halvings < 0:
            raise ValueError("Picard settings need tol >= 0, maxit >= 1, halvings >= 0")
        if not self.alpha < self.beta:
            raise ValueError(f"need alpha < beta, got [{self.alpha}, {self.beta}]")
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "yd", yd)

    @property
    def tau(self) -> float:
        return self.T / self.nt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.nt + 1) * self.tau

    @cached_property
    def chi(self) -> np.ndarray:
        return omega_indicator(self.grid)

    @cached_property
    def yd_levels(self) -> np.ndarray:
        return np.broadcast_to(self.yd, (self.nt + 1, self.grid.n))

    @cached_property
    def base_operator(self) -> LocalOperator:
        """I/tau + A_h, to be shifted by the reaction coefficient."""
        sub, diag, sup = laplacian_bands(self.grid)
        return LocalOperator(sub, diag + 1.0 / self.tau, sup)

    def replace(self, **changes) -> "ProblemSpec":
        kw = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kw.update(changes)
        return ProblemSpec(**kw)

    def control(self, value: float = 0.0) -> np.ndarray:
        """Constant control array of shape (nt, n)."""
        return np.full((self.nt, self.grid.n), float(value))


@dataclass(frozen=True, eq=False)
class Trajectory:
    values: np.ndarray  # (nt+1, n)
    kind: str = "state"
    info: dict = field(default_factory=dict, compare=False)

    @property
    def nt(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, m):
        return self.values[m]


def _picard_step(p: ProblemSpec, y_prev: np.ndarray, src: np.ndarray, dt: float, step: int):
    """One implicit step of size dt with l(y) at the new level, by Picard iteration.

    Returns (y, converged, residual, iterations).
    """
    a = p.reaction
    if dt == p.tau:
        base = p.base_operator
    else:
        sub, diag, sup = laplacian_bands(p.grid)
        base = LocalOperator(sub, diag + 1.0 / dt, sup)
    rhs = y_prev / dt + src
    ell = integrate(p.grid, y_prev)
    res = np.inf
    done = False
    for it in range(1, p.picard_maxit + 1):
        y_new = solve_local(base.shifted(float(a.eval(ell))), rhs)
        ell_new = integrate(p.grid, y_new)
        res_new = abs(ell_new - ell)
        if done and not res_new < 0.5 * res:
            # round-off floor reached; keep the last contracting iterate
            return y, True, res, it
        y, res, ell = y_new, res_new, ell_new
        if res == 0.0:
            return y, True, res, it
        # once within tolerance, keep contracting down to round-off so the
        # discrete control-to-state map stays smooth in the control
        done = done or res <= p.picard_tol * (1 + abs(ell))
    return y, done, res, p.picard_maxit


def _advance(p, y_prev, src, dt, step, depth):
    """Advance by dt, splitting into two half steps whenever Picard stalls."""
    y, ok, res, _ = _picard_step(p, y_prev, src, dt, step)
    if ok:
        return y, depth
    if depth >= p.max_halvings:
        raise PicardDiverged(step, res)
    log.info("Picard stalled at level %d (residual %.2e); halving dt to %.3e", step, res, dt / 2)
    y_mid, d1 = _advance(p, y_prev, src, dt / 2, step, depth + 1)
    y_end, d2 = _advance(p, y_mid, src, dt / 2, step, depth + 1)
    return y_end, max(d1, d2)


def solve_state(p: ProblemSpec, v) -> Trajectory:
    """Nonlinear state for control ``v`` of shape (nt, n)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (p.nt, p.grid.n):
        raise ValueError(f"control must have shape ({p.nt}, {p.grid.n}), got {v.shape}")
    y = np.empty((p.nt + 1, p.grid.n))
    y[0] = p.y0
    substeps = 0
    for m in range(1, p.nt + 1):
        y[m], depth = _advance(p, y[m - 1], p.chi * v[m - 1], p.tau, m, 0)
        substeps += depth > 0
    return Trajectory(y, "state", {"substepped_levels": substeps})


def _coerce(traj, shape):
    arr = traj.values if isinstance(traj, Trajectory) else np.asarray(traj, dtype=float)
    return np.broadcast_to(arr, shape)


def solve_general_linear(p: ProblemSpec, frozen_l, a_tilde, f, y0) -> Trajectory:
    """z_t - Lap z + a(l_m) z + a_tilde * \\int z = f with z(0) = y0.

    ``frozen_l`` has one entry per time level (entry 0 unused); ``a_tilde`` and
    ``f`` are (nt+1, n) level-aligned arrays or Trajectories (row 0 unused).
    """
    shape = (p.nt + 1, p.grid.n)
    ell = np.broadcast_to(np.asarray(frozen_l, dtype=float), (p.nt + 1,))
    at = _coerce(a_tilde, shape)
    f = _coerce(f, shape)
    w = p.grid.weights
    z = np.empty(shape)
    z[0] = y0
    base = p.base_operator
    tau = p.tau
    for m in range(1, p.nt + 1):
        op = base.shifted(float(p.reaction.eval(ell[m])))
        z[m] = solve_rank_one(op, RankOneCoupling(at[m], w), z[m - 1] / tau + f[m], step=m)
    return Trajectory(z, "linear")


def _levels_from_control(p: ProblemSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    src = np.zeros((p.nt + 1, p.grid.n))
    src[1:] = p.chi * v
    return src


def solve_linearized(p: ProblemSpec, y: Trajectory, v) -> Trajectory:
    """Directional derivative z_v of the control-to-state map at y."""
    ell = integrate(p.grid, y.values)
    a_tilde = p.reaction.d1(ell)[:, None] * y.values
    z = solve_general_linear(p, ell, a_tilde, _levels_from_control(p, v), np.zeros(p.grid.n))
    return Trajectory(z.values, "linearized")


def assemble_F(p: ProblemSpec, y: Trajectory, zv: Trajectory, zw: Trajectory) -> np.ndarray:
    """Source of the second linearisation, shape (nt+1, n); symmetric in (zv, zw)."""
    g = p.grid
    yv, v, w = (t.values if isinstance(t, Trajectory) else np.asarray(t) for t in (y, zv, zw))
    if not (yv.shape == v.shape == w.shape):
        raise ValueError("trajectories must share a shape")
    ell = integrate(g, yv)
    Iv = integrate(g, v)[:, None]
    Iw = integrate(g, w)[:, None]
    d1 = p.reaction.d1(ell)[:, None]
    d2 = p.reaction.d2(ell)[:, None]
    return -d1 * (v * Iw + w * Iv) - d2 * yv * (Iv * Iw)


def solve_second_linearization(p: ProblemSpec, y: Trajectory, zv: Trajectory, zw: Trajectory) -> Trajectory:
    ell = integrate(p.grid, y.values)
    a_tilde = p.reaction.d1(ell)[:, None] * y.values
    F = assemble_F(p, y, zv, zw)
    z = solve_general_linear(p, ell, a_tilde, F, np.zeros(p.grid.n))
    return Trajectory(z.values, "second_linearized")
