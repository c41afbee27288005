import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from nonlocal_ocp import (
    Trajectory,
    critical_cone_sample,
    kkt_residual,
    project_box,
    projected_gradient,
    solve_adjoint,
    solve_state,
    ssc_check,
)
from nonlocal_ocp.objective import norm_omega

from conftest import CONSTANT, small_problem


@settings(max_examples=50)
@given(arrays(float, (4, 5), elements=st.floats(-10, 10)))
def test_projection_is_idempotent_and_inside(w):
    u = project_box(w, 0.0, 1.0)
    assert np.all((u >= 0) & (u <= 1))
    np.testing.assert_array_equal(project_box(u, 0.0, 1.0), u)


def test_projection_examples():
    w = np.array([0.0, 0.3, 1.0])
    np.testing.assert_array_equal(project_box(w, 0.0, 1.0), w)
    mu = 1.0
    np.testing.assert_array_equal(project_box(-np.full(3, -2.0) / mu, 0.0, 1.0), np.ones(3))
    np.testing.assert_array_equal(project_box(-np.full(3, 0.5) / mu, 0.0, 1.0), np.zeros(3))


@pytest.fixture(scope="module")
def solved():
    p = small_problem(mu=0.1, beta=1.0)
    u, rep = projected_gradient(p, p.control(0.0), tol=1e-8)
    return p, u, rep


def test_optimizer_converges(solved):
    p, u, rep = solved
    assert rep.converged and not rep.line_search_failed
    assert rep.residual_history[-1] <= 1e-8
    assert rep.fraction_at_alpha + rep.fraction_at_beta + rep.fraction_inactive == pytest.approx(1.0, abs=1e-12)
    assert all(d < 0 for d in rep.accepted_decreases)
    assert rep.final_cost.total == pytest.approx(rep.cost_history[-1].total)
    assert kkt_residual(p, u).residual <= 10 * 1e-8


def test_restart_at_optimum_takes_no_steps(solved):
    p, u, _ = solved
    _, rep = projected_gradient(p, u, tol=1e-6)
    assert rep.iterates == 0 and rep.converged


def test_iteration_cap_reported():
    p = small_problem(mu=0.1, beta=1.0)
    _, rep = projected_gradient(p, p.control(0.0), tol=1e-14, max_iters=2)
    assert not rep.converged and rep.iterates == 2
    assert any("cap" in n for n in rep.notes)


def test_convex_instance_two_starts_agree():
    p = small_problem(reaction=CONSTANT, mu=0.1, beta=1.0)
    ua, _ = projected_gradient(p, p.control(p.alpha), tol=1e-9)
    ub, _ = projected_gradient(p, p.control(p.beta), tol=1e-9)
    assert norm_omega(p, ua - ub) <= 1e-5


def test_large_mu_bound():
    p = small_problem(mu=1e3, alpha=-1.0, beta=1.0)
    p = p.replace(yd=solve_state(p, p.control()).values)
    u, rep = projected_gradient(p, p.control(0.5), tol=1e-6)
    assert rep.converged
    assert norm_omega(p, u) <= 1e-8  # zero control is the exact minimiser here
    q = solve_adjoint(p, solve_state(p, u))
    measure = p.T * np.sum(p.chi * p.grid.weights)
    # u = P(-q/mu) holds up to the projection residual of the returned iterate
    slack = kkt_residual(p, u).residual
    assert norm_omega(p, u) <= np.abs(q.values).max() * np.sqrt(measure) / p.mu + slack


def test_kkt_violation_detected():
    p = small_problem(beta=1.0)
    u = p.control(p.beta)  # tracking target sits below the state, so q + mu u > 0
    res = kkt_residual(p, u)
    assert res.residual > 1e-2
    assert res.vi_min < 0


def test_cone_unconstrained_directions():
    p = small_problem(mu=1.0, alpha=-10.0, beta=10.0)
    u = p.control(0.5)
    q = Trajectory(np.full((p.nt + 1, p.grid.n), -0.5))
    dirs = critical_cone_sample(p, u, q, 5, seed=0)
    assert len(dirs) == 5
    for v in dirs:
        assert norm_omega(p, v) == pytest.approx(1.0)
        assert not v[:, p.chi == 0].any()
        assert (v > 0).any() and (v < 0).any()


def test_cone_empty_under_strict_complementarity():
    p = small_problem(mu=1.0)
    q = Trajectory(np.full((p.nt + 1, p.grid.n), 1.0))
    assert critical_cone_sample(p, p.control(0.0), q, 5) == []


def test_cone_sign_pattern():
    p = small_problem(mu=1.0, alpha=0.0, beta=1.0)
    u = p.control(0.5)
    u[:, :5] = 0.0
    u[:, 5:] = 1.0
    q = Trajectory(np.vstack([-p.mu * np.vstack([u]), np.zeros((1, p.grid.n))]))
    for v in critical_cone_sample(p, u, q, 10, seed=1):
        assert np.all(v[:, :5] >= 0) and np.all(v[:, 5:] <= 0)


def test_ssc_constant_reaction_at_least_mu():
    p = small_problem(reaction=CONSTANT)
    u = p.control(0.5)
    q = Trajectory(np.full((p.nt + 1, p.grid.n), -0.5 * p.mu))
    dirs = critical_cone_sample(p, u, q, 10)
    assert ssc_check(p, u, dirs) >= p.mu


def test_ssc_empty_is_inf(caplog):
    p = small_problem()
    with caplog.at_level(logging.WARNING):
        assert ssc_check(p, p.control(), []) == np.inf
    assert caplog.records


def test_report_dict_keys(solved):
    d = solved[2].as_dict()
    for key in ("iterates", "final_cost", "converged", "residual_history", "active_fractions"):
        assert key in d
