import numpy as np
import pytest

from nonlocal_ocp import ProblemSpec, build_grid, solve_state
from nonlocal_ocp.verify import (
    bound_check,
    convergence_study,
    fd_gradient_check,
    fit_slope,
    lipschitz_probe,
    ode_oracle_uniform,
    random_admissible,
    rank_one_oracle_check,
    spatial_order,
)

from conftest import CONSTANT, LOGISTIC, small_problem


def uniform(reaction, nt=100, c=1.0):
    g = build_grid(1.0, 5, (0.0, 1.0))
    return ProblemSpec(g, reaction, np.full(5, c), np.zeros(5), 1.0, 1.0, nt, 0.0, 1.0)


def cosine_problem(n, nt=40):
    g = build_grid(1.0, n, (0.0, 1.0))
    return ProblemSpec(g, LOGISTIC, np.cos(np.pi * g.x), np.zeros(n), 1.0, 0.1, nt, 0.0, 1.0)


def test_fit_slope_exact():
    x = np.array([1.0, 2.0, 4.0])
    assert fit_slope(x, 3 * x**2) == pytest.approx(2.0)


def test_oracle_exponential_decay():
    _, Y = ode_oracle_uniform(uniform(CONSTANT, 10))
    assert abs(Y[-1] - np.exp(-1.0)) <= 1e-10


def test_oracle_logistic_monotone():
    _, Y = ode_oracle_uniform(uniform(LOGISTIC, 20))
    assert np.all(np.diff(Y) < 0)


def test_oracle_needs_uniform_data():
    p = small_problem()
    with pytest.raises(ValueError):
        ode_oracle_uniform(p)


def test_rank_one_oracle():
    assert rank_one_oracle_check(100, seed=0) <= 1e-10


def test_zero_direction_gives_zero_errors():
    p = small_problem()
    r = fd_gradient_check(p, p.control(1.0), p.control())
    assert r.errors == [0.0] * len(r.eps) and r.slope is None


def test_spatial_order():
    errors, slope = spatial_order(cosine_problem, [51, 101, 201], 1601)
    assert abs(slope - 2.0) <= 0.3
    assert errors[0] > errors[1] > errors[2]


def test_spatial_grids_must_nest():
    with pytest.raises(ValueError):
        spatial_order(cosine_problem, [50], 1601)


def test_combined_refinement_is_monotone():
    make = lambda n, nt: cosine_problem(n, nt)  # noqa: E731
    errors, _ = convergence_study(make, [(11, 10), (21, 20), (41, 40)], (161, 160))
    assert errors[0] > errors[1] > errors[2]


def test_bound_examples():
    p = small_problem()
    ok, slack = bound_check(solve_state(p, p.control()), p, p.control())
    assert ok and slack >= 0
    g = build_grid(1.0, 21, (0.0, 1.0))
    p = ProblemSpec(g, CONSTANT, np.zeros(21), np.zeros(21), 1.0, 1.0, 50, 0.0, 2.0)
    y = solve_state(p, p.control(2.0))
    assert bound_check(y, p, p.control(2.0))[0]
    assert np.abs(y.values).max() <= 2.0


def test_bound_stress_logistic(default_problem):
    p = default_problem.replace(alpha=-1e3, beta=1e3)
    rng = np.random.default_rng(4)
    for v in (p.control(1e3), p.control(-1e3), rng.uniform(-1e3, 1e3, (p.nt, p.grid.n))):
        assert bound_check(solve_state(p, v), p, v)[0]


def test_lipschitz_skips_identical_pairs():
    p = small_problem()
    u = p.control(1.0)
    r = lipschitz_probe(p, [(u, u)])
    assert r.state_ratios == [] and r.max_state == 0.0


def test_lipschitz_constant_reaction_exact():
    p = small_problem(reaction=CONSTANT)
    rng = np.random.default_rng(7)
    pairs = list(zip(random_admissible(p, rng, 10), random_admissible(p, rng, 10)))
    r = lipschitz_probe(p, pairs)
    # the map is affine and level differences are parallel, so the ratio is one number
    assert np.ptp(r.state_ratios) <= 1e-8 * r.max_state
    assert np.ptp(r.adjoint_ratios) <= 1e-8 * r.max_adjoint


def test_lipschitz_logistic_stable(default_problem):
    p = default_problem
    rng = np.random.default_rng(8)
    pairs = list(zip(random_admissible(p, rng, 20), random_admissible(p, rng, 20)))
    r = lipschitz_probe(p, pairs)
    assert len(r.state_ratios) == 20
    assert max(r.state_ratios) <= 2 * min(r.state_ratios)
    assert max(r.adjoint_ratios) <= 2 * min(r.adjoint_ratios)


def test_lipschitz_iid_pairs_finite(default_problem):
    p = default_problem
    rng = np.random.default_rng(9)
    pairs = list(zip(random_admissible(p, rng, 5, "uniform"), random_admissible(p, rng, 5, "uniform")))
    r = lipschitz_probe(p, pairs)
    assert np.all(np.isfinite(r.state_ratios)) and 0 < r.max_state < 1.0


def test_random_admissible_kinds(default_problem):
    rng = np.random.default_rng(0)
    for kind in ("level", "uniform"):
        for u in random_admissible(default_problem, rng, 3, kind):
            assert u.min() >= default_problem.alpha and u.max() <= default_problem.beta
    with pytest.raises(ValueError):
        random_admissible(default_problem, rng, 1, "bogus")
