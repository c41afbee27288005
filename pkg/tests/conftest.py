import numpy as np
import pytest

from nonlocal_ocp import ProblemSpec, ReactionFunction, build_grid
from nonlocal_ocp.config import build_problem, load

LOGISTIC = ReactionFunction("logistic", 1.0, 3.0, 1.0, 0.7)
CONSTANT = ReactionFunction("constant", 1.0)


@pytest.fixture(scope="session")
def default_problem() -> ProblemSpec:
    return build_problem(load())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def small_problem(reaction=LOGISTIC, n=11, nt=10, omega=(0.2, 0.8), mu=0.5,
                  alpha=0.0, beta=2.0, T=1.0) -> ProblemSpec:
    g = build_grid(1.0, n, omega)
    y0 = 1.0 + 0.5 * np.cos(np.pi * g.x)
    yd = 0.5 + 0.2 * np.cos(np.pi * g.x)
    return ProblemSpec(g, reaction, y0, yd, mu, T, nt, alpha, beta)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
