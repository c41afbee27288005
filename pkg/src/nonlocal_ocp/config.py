"""INI configuration -> ProblemSpec and solver options."""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from nonlocal_ocp.grid import build_grid
from nonlocal_ocp.reaction import ReactionFunction
from nonlocal_ocp.state import ProblemSpec

DEFAULT_CONFIG = resources.files("nonlocal_ocp") / "configs" / "default.ini"

_REQUIRED = {
    "grid": ("L", "n", "omega_lo", "omega_hi"),
    "reaction": ("kind", "a0"),
    "time": ("T", "nt"),
    "cost": ("mu",),
    "box": ("alpha", "beta"),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OptSettings:
    tol: float = 1e-6
    max_iters: int = 500
    seed: int = 0
    u0: float = 0.0
    mu_values: tuple[float, ...] = (1.0, 0.5, 0.2, 0.1)


def load(path=None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keys are case-sensitive (L, T, M)
    path = DEFAULT_CONFIG if path is None else Path(path)
    try:
        cp.read_string(path.read_text(), source=str(path))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    for section, keys in _REQUIRED.items():
        for key in keys:
            if not cp.has_option(section, key):
                raise ConfigError(f"missing required key '{section}.{key}'")
    return cp


def _get(cp, section, key, conv=float, default=None):
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(f"missing required key '{section}.{key}'")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"bad value for '{section}.{key}': {raw!r}") from None


def _profile(cp, section, key, x, L):
    kind = cp.get(section, key, fallback="const").strip()
    offset = _get(cp, section, "offset", default=0.0)
    amp = _get(cp, section, "amplitude", default=0.0)
    if kind == "const":
        return np.full_like(x, offset)
    if kind == "cosine":
        return offset + amp * np.cos(np.pi * x / L)
    raise ConfigError(f"'{section}.{key}' must be 'const' or 'cosine', got {kind!r}")


def build_problem(cp: configparser.ConfigParser) -> ProblemSpec:
    try:
        L = _get(cp, "grid", "L")
        grid = build_grid(L, _get(cp, "grid", "n", int),
                          (_get(cp, "grid", "omega_lo"), _get(cp, "grid", "omega_hi")))
        M = _get(cp, "reaction", "M", default=-1.0)
        reaction = ReactionFunction(
            kind=cp.get("reaction", "kind").strip(),
            a0=_get(cp, "reaction", "a0"),
            a1=_get(cp, "reaction", "a1") if cp.has_option("reaction", "a1") else None,
            k=_get(cp, "reaction", "k", default=0.0),
            M=None if M < 0 else M,
        )
        return ProblemSpec(
            grid=grid,
            reaction=reaction,
            y0=_profile(cp, "init", "y0", grid.x, L),
            yd=_profile(cp, "target", "yd", grid.x, L),
            mu=_get(cp, "cost", "mu"),
            T=_get(cp, "time", "T"),
            nt=_get(cp, "time", "nt", int),
            alpha=_get(cp, "box", "alpha"),
            beta=_get(cp, "box", "beta"),
            picard_tol=_get(cp, "time", "picard_tol", default=1e-10),
            picard_maxit=_get(cp, "time", "picard_maxit", int, default=50),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def opt_settings(cp: configparser.ConfigParser) -> OptSettings:
    mus = cp.get("sweep", "mu_values", fallback=None)
    try:
        mu_values = tuple(float(m) for m in mus.split(",")) if mus else OptSettings.mu_values
    except ValueError:
        raise ConfigError(f"bad value for 'sweep.mu_values': {mus!r}") from None
    return OptSettings(
        tol=_get(cp, "opt", "tol", default=1e-6),
        max_iters=_get(cp, "opt", "max_iters", int, default=500),
        seed=_get(cp, "opt", "seed", int, default=0),
        u0=_get(cp, "opt", "u0", default=0.0),
        mu_values=mu_values,
    )
