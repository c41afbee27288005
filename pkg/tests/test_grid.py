import logging

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonlocal_ocp.grid import build_grid, integrate, laplacian_apply, laplacian_bands, omega_indicator


def test_three_node_weights():
    g = build_grid(1.0, 3, (0.0, 1.0))
    assert g.h == 0.5
    np.testing.assert_array_equal(g.weights, [0.25, 0.5, 0.25])


def test_weights_sum_to_length():
    g = build_grid(2.0, 5, (0.5, 1.5))
    assert g.h == 0.5
    assert g.weights.sum() == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("args", [
    (1.0, 2, (0.0, 1.0)),
    (0.0, 5, (0.0, 1.0)),
    (-1.0, 5, (0.0, 1.0)),
    (1.0, 5, (0.5, 0.5)),
    (1.0, 5, (0.8, 0.2)),
    (1.0, 5, (-0.1, 0.5)),
    (1.0, 5, (0.0, 1.5)),
])
def test_rejects_bad_grids(args):
    with pytest.raises(ValueError):
        build_grid(*args)


@given(st.floats(-5, 5), st.integers(3, 60))
def test_laplacian_kills_constants(c, n):
    g = build_grid(1.0, n, (0.0, 1.0))
    np.testing.assert_allclose(laplacian_apply(g, np.full(n, c)), 0.0, atol=1e-9 * (1 + abs(c)) * n**2)


def test_laplacian_of_cosine():
    g = build_grid(1.0, 201, (0.0, 1.0))
    f = np.cos(np.pi * g.x)
    # A_h approximates -d2/dx2, so A_h cos(pi x) ~ pi^2 cos(pi x)
    err = np.max(np.abs(laplacian_apply(g, f) - np.pi**2 * f))
    assert err <= 1e-3


def test_laplacian_interior_stencil():
    g = build_grid(1.0, 5, (0.0, 1.0))
    e = np.zeros(5)
    e[2] = 1.0
    row = laplacian_apply(g, np.eye(5))[:, 2]
    np.testing.assert_allclose(row, np.array([0, -1, 2, -1, 0]) / g.h**2)
    np.testing.assert_allclose(laplacian_apply(g, e), np.array([0, -1, 2, -1, 0]) / g.h**2)


def test_laplacian_is_weight_symmetric(rng):
    g = build_grid(1.0, 9, (0.0, 1.0))
    A = laplacian_apply(g, np.eye(9)).T
    WA = np.diag(g.weights) @ A
    np.testing.assert_allclose(WA, WA.T, atol=1e-10)


def test_bands_match_apply():
    g = build_grid(2.0, 7, (0.0, 2.0))
    sub, diag, sup = laplacian_bands(g)
    dense = np.diag(diag) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)
    np.testing.assert_allclose(dense, laplacian_apply(g, np.eye(7)).T)


def test_laplacian_length_mismatch():
    g = build_grid(1.0, 5, (0.0, 1.0))
    with pytest.raises(ValueError):
        laplacian_apply(g, np.ones(4))


def test_integrate_examples():
    assert integrate(build_grid(2.0, 9, (0.0, 2.0)), np.ones(9)) == pytest.approx(2.0, abs=1e-15)
    for n in (3, 10, 57):
        g = build_grid(1.0, n, (0.0, 1.0))
        assert integrate(g, g.x) == pytest.approx(0.5, abs=1e-15)
    g = build_grid(1.0, 101, (0.0, 1.0))
    assert abs(integrate(g, g.x**2) - 1 / 3) <= 1e-4


def test_indicator_examples():
    np.testing.assert_array_equal(omega_indicator(build_grid(1.0, 6, (0.0, 1.0))), np.ones(6))
    np.testing.assert_array_equal(omega_indicator(build_grid(2.0, 5, (0.5, 1.5))), [0, 1, 1, 0, 0])


def test_empty_indicator_warns(caplog):
    g = build_grid(1.0, 3, (0.25, 0.26))
    with caplog.at_level(logging.WARNING):
        chi = omega_indicator(g)
    assert not chi.any()
    assert any("no grid node" in r.getMessage() for r in caplog.records)
