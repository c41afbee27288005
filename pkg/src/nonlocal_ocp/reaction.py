"""Bounded, non-decreasing, C^2 reaction coefficients r -> a(r)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("constant", "logistic", "smooth_clamp")

# sup|s'| and sup|s''| of the standard sigmoid
_SIG_D1 = 0.25
_SIG_D2 = 1.0 / (6.0 * np.sqrt(3.0))
# sup|c'| and sup|c''| of the quintic smootherstep c(s) = 6s^5 - 15s^4 + 10s^3
_STEP_D1 = 30.0 / 16.0
_STEP_D2 = 10.0 / np.sqrt(3.0)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass(frozen=True)
class ReactionFunction:
    """a(r) = a0 + (a1 - a0) * ramp(k r).

    ``logistic`` uses the standard sigmoid as ramp; ``smooth_clamp`` uses the
    quintic smootherstep of clip(1/2 + k r, 0, 1). ``M`` is the declared bound on
    |a'| + |a''|; when omitted it is set to the analytic supremum bound.
    """

    kind: str = "constant"
    a0: float = 1.0
    a1: float | None = None
    k: float = 0.0
    M: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown reaction kind {self.kind!r}; expected one of {KINDS}")
        if not self.a0 > 0:
            raise ValueError(f"a0 must be positive, got {self.a0}")
        if self.a1 is None:
            object.__setattr__(self, "a1", self.a0)
        if self.a1 < self.a0:
            raise ValueError(f"a1={self.a1} must be >= a0={self.a0}")
        if self.k < 0:
            raise ValueError(f"slope k must be non-negative, got {self.k}")
        if self.M is None:
            object.__setattr__(self, "M", self.derivative_bound())

    def derivative_bound(self) -> float:
        """Analytic upper bound on sup_r |a'(r)| + |a''(r)|."""
        span = self.a1 - self.a0
        if self.kind == "constant":
            return 0.0
        if self.kind == "logistic":
            return span * (_SIG_D1 * self.k + _SIG_D2 * self.k**2)
        return span * (_STEP_D1 * self.k + _STEP_D2 * self.k**2)

    def _ramp(self, r, order):
        x = self.k * np.asarray(r, dtype=float)
        if self.kind == "logistic":
            s = _sigmoid(x)
            return (s, s * (1 - s), s * (1 - s) * (1 - 2 * s))[order]
        s = np.clip(0.5 + x, 0.0, 1.0)
        if order == 0:
            return s**3 * (10 - 15 * s + 6 * s**2)
        if order == 1:
            return 30 * s**2 * (1 - s) ** 2
        return 60 * s * (1 - s) * (1 - 2 * s)

    def eval(self, r):
        if self.kind == "constant":
            return np.full_like(np.asarray(r, dtype=float), self.a0)[()]
        return (self.a0 + (self.a1 - self.a0) * self._ramp(r, 0))[()]

    def d1(self, r):
        if self.kind == "constant":
            return np.zeros_like(np.asarray(r, dtype=float))[()]
        return ((self.a1 - self.a0) * self.k * self._ramp(r, 1))[()]

    def d2(self, r):
        if self.kind == "constant":
            return np.zeros_like(np.asarray(r, dtype=float))[()]
        return ((self.a1 - self.a0) * self.k**2 * self._ramp(r, 2))[()]

    __call__ = eval


@dataclass(frozen=True)
class ValidationReport:
    bounds_ok: bool
    monotone_ok: bool
    derivative_bound_ok: bool
    observed_sup: float

    @property
    def ok(self) -> bool:
        return self.bounds_ok and self.monotone_ok and self.derivative_bound_ok


def validate(f: ReactionFunction, r_lo: float = -100.0, r_hi: float = 100.0,
             samples: int = 10_000) -> ValidationReport:
    """Check the structural assumptions on a sample grid. Never raises on failure."""
    if not r_lo < r_hi or samples < 2:
        raise ValueError("need r_lo < r_hi and at least 2 samples")
    r = np.linspace(r_lo, r_hi, samples)
    a = np.asarray(f.eval(r))
    slack = 1e-14 * max(1.0, abs(f.a1))
    bounds_ok = bool(np.all(a >= f.a0 - slack) and np.all(a <= f.a1 + slack))
    monotone_ok = bool(np.all(np.diff(a) >= -slack))
    sup = float(np.max(np.abs(f.d1(r)) + np.abs(f.d2(r))))
    deriv_ok = sup <= f.M * (1 + 1e-12)
    return ValidationReport(bounds_ok, monotone_ok, deriv_ok, sup)
