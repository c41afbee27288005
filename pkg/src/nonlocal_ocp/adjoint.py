"""Backward adjoint solve, built as the exact transpose of the linearised forward step.

Indexing: ``q[nt] = 0`` and step m (m = nt..1) produces ``q[m-1]`` from
``q[m]`` with coefficients taken at level m. Consequently ``q[m-1]`` is the
multiplier paired with the control on (t_{m-1}, t_m]; the gradient at control
row m-1 is ``chi * (q[m-1] + mu * u[m-1])``.
"""

from __future__ import annotations

import numpy as np

from nonlocal_ocp.grid import integrate
from nonlocal_ocp.linsolve import RankOneCoupling, solve_rank_one
from nonlocal_ocp.state import ProblemSpec, Trajectory


def solve_adjoint(p: ProblemSpec, y: Trajectory, source=None) -> Trajectory:
    """-q_t - Lap q + a'(l(y)) \\int y q + a(l(y)) q = source, q(T) = 0.

    ``source`` defaults to the tracking misfit y - y_d; pass an (nt+1, n)
    array (row 0 unused) to solve against another right-hand side.
    """
    yv = y.values
    if source is None:
        source = yv - p.yd_levels
    source = np.broadcast_to(np.asarray(source, dtype=float), yv.shape)
    g = p.grid
    ell = integrate(g, yv)
    a = p.reaction
    tau = p.tau
    base = p.base_operator
    ones = np.ones(g.n)
    q = np.zeros_like(yv)
    for m in range(p.nt, 0, -1):
        op = base.shifted(float(a.eval(ell[m])))
        coupling = RankOneCoupling(float(a.d1(ell[m])) * ones, g.weights * yv[m])
        q[m - 1] = solve_rank_one(op, coupling, q[m] / tau + source[m], step=m)
    return Trajectory(q, "adjoint")
