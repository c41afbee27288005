"""Uniform 1D mesh on (0, L) with a Neumann Laplacian and trapezoid quadrature."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid:
    """Node-based grid. ``omega`` is the half-open control interval [lo, hi).

    When ``hi == L`` the right endpoint node is included, so ``omega=(0, L)``
    covers every node.
    """

    L: float
    n: int
    omega: tuple[float, float]
    x: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return self.L / (self.n - 1)

    def _check(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape[-1] != self.n:
            raise ValueError(f"field has {f.shape[-1]} nodes, grid has {self.n}")
        return f


def build_grid(L: float, n: int, omega: tuple[float, float]) -> Grid:
    if not L > 0:
        raise ValueError(f"domain length must be positive, got {L}")
    if int(n) != n or n < 3:
        raise ValueError(f"need at least 3 nodes, got {n}")
    lo, hi = map(float, omega)
    if not (0.0 <= lo < hi <= L):
        raise ValueError(f"control interval [{lo}, {hi}) must be nonempty and inside [0, {L}]")
    n = int(n)
    h = L / (n - 1)
    x = np.arange(n) * h
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    x.setflags(write=False)
    w.setflags(write=False)
    return Grid(float(L), n, (lo, hi), x, w)


def laplacian_apply(grid: Grid, f) -> np.ndarray:
    """Discrete negative Laplacian with mirrored-ghost Neumann closure.

    Works on a single field or on a stack of fields (last axis = space).
    """
    f = grid._check(f)
    out = np.empty_like(f)
    out[..., 1:-1] = -f[..., :-2] + 2 * f[..., 1:-1] - f[..., 2:]
    out[..., 0] = 2 * f[..., 0] - 2 * f[..., 1]
    out[..., -1] = 2 * f[..., -1] - 2 * f[..., -2]
    return out / grid.h**2


def laplacian_bands(grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(sub, diag, super) of the negative Laplacian, each of length n.

    ``sub[0]`` and ``super[-1]`` are unused and set to zero.
    """
    n, h2 = grid.n, grid.h**2
    diag = np.full(n, 2.0 / h2)
    sub = np.full(n, -1.0 / h2)
    sup = np.full(n, -1.0 / h2)
    sub[0] = sup[-1] = 0.0
    sup[0] = -2.0 / h2
    sub[-1] = -2.0 / h2
    return sub, diag, sup


def integrate(grid: Grid, f) -> float | np.ndarray:
    """Trapezoid integral over the domain; vectorised over leading axes."""
    return grid._check(f) @ grid.weights


def omega_indicator(grid: Grid) -> np.ndarray:
    lo, hi = grid.omega
    x = grid.x
    chi = (x >= lo) & (x < hi)
    if hi >= grid.L:
        chi |= x >= lo
    if not chi.any():
        log.warning("control interval [%g, %g) contains no grid node (h=%g); control has no effect",
                    lo, hi, grid.h)
    return chi.astype(float)
