"""Tridiagonal solves with an optional rank-one coupling term.

Every integral coupling c(x) * \\int z in the time-discrete equations becomes
``col (x) row`` with ``row`` built from quadrature weights, so each implicit
step is one banded factorisation plus a Sherman-Morrison correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dgtsv

SINGULAR_THRESHOLD = 1e-12


class SingularUpdate(ArithmeticError):
    """1 + row . op^{-1} col vanished; the time step is too large for the coupling."""

    def __init__(self, denom: float, step: int | None = None):
        self.denom = denom
        self.step = step
        where = "" if step is None else f" at time level {step}"
        super().__init__(f"rank-one update singular{where}: |1 + row.op^-1 col| = {abs(denom):.3e}")


@dataclass(frozen=True)
class LocalOperator:
    """Tridiagonal matrix; ``sub[0]`` and ``sup[-1]`` are ignored."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    @property
    def n(self) -> int:
        return len(self.diag)

    def is_dominant(self, tau: float = np.inf) -> bool:
        off = np.abs(self.sub) + np.abs(self.sup)
        off[0] = abs(self.sup[0])
        off[-1] = abs(self.sub[-1])
        return bool(np.all(self.diag > 0) and np.all(self.diag >= off + 1.0 / tau))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.sub[1:] * x[:-1]
        y[:-1] += self.sup[:-1] * x[1:]
        return y

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub[1:], -1) + np.diag(self.sup[:-1], 1)

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.diag) + np.abs(self.sub) + np.abs(self.sup)))

    def shifted(self, s: float) -> "LocalOperator":
        return LocalOperator(self.sub, self.diag + s, self.sup)


@dataclass(frozen=True)
class RankOneCoupling:
    """The matrix ``outer(col, row)``."""

    col: np.ndarray
    row: np.ndarray


def solve_local(op: LocalOperator, rhs) -> np.ndarray:
    """Solve ``op @ x = rhs``; rhs may carry extra trailing columns."""
    rhs = np.asarray(rhs, dtype=float)
    b = rhs.reshape(len(rhs), -1)
    *_, x, info = dgtsv(op.sub[1:], op.diag, op.sup[:-1], b)
    if info != 0:
        raise np.linalg.LinAlgError(f"tridiagonal solve failed: zero pivot at row {info}")
    return x.reshape(rhs.shape)


def solve_rank_one(op: LocalOperator, c: RankOneCoupling, rhs, step: int | None = None) -> np.ndarray:
    """Solve ``(op + outer(c.col, c.row)) x = rhs`` via Sherman-Morrison."""
    rhs = np.asarray(rhs, dtype=float)
    if not np.any(c.col):
        return solve_local(op, rhs)
    x1, x2 = solve_local(op, np.column_stack([rhs, c.col])).T
    denom = 1.0 + c.row @ x2
    if abs(denom) < SINGULAR_THRESHOLD:
        raise SingularUpdate(denom, step)
    return x1 - x2 * ((c.row @ x1) / denom)
