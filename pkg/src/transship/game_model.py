"""Market parameters, validation, derived economics, and game classification.

A market is described by seven numbers (price r, cost c, salvage nu, unit
transport cost t, demand mean mu, demand std dev sigma, pairwise correlation
rho) shared by all identical agents. Validation turns them into the derived
quantities every formula is written in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Union

from .normal_math import std_inv_cdf, std_pdf

__all__ = [
    "ParameterError",
    "MarketParams",
    "DerivedEconomics",
    "GameType",
    "FeasibilityReport",
    "validate_params",
    "classify_game",
    "pooling_factor",
    "demand_feasibility_check",
    "load_params",
    "params_from_mapping",
]

MEAN_GAME_TOL = 1e-12

PARAM_KEYS = ("r", "c", "nu", "t", "mu", "sigma", "rho")


class ParameterError(ValueError):
    """A market parameter set violates one of the model's inequalities."""


@dataclass(frozen=True)
class MarketParams:
    """Economic and demand parameters shared by all identical agents."""

    r: float       # selling price per unit
    c: float       # purchase cost per unit
    nu: float      # salvage value per unit
    t: float       # transport cost per unit shipped
    mu: float      # demand mean
    sigma: float   # demand standard deviation
    rho: float     # pairwise demand correlation

    def __post_init__(self):
        for name in PARAM_KEYS:
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True)
class DerivedEconomics:
    """Quantities derived from a validated MarketParams.

    g = r - c (sale benefit), g_tilde = c - nu (markdown avoidance),
    p = r - nu - t (marginal transshipment profit), R = g/(g + g_tilde)
    (critical fractile), gamma = t/(r - nu), gamma_tilde = 1 - gamma.
    """

    g: float
    g_tilde: float
    p: float
    R: float
    gamma: float
    gamma_tilde: float


class GameType(enum.Enum):
    OVER_MEAN = "over-mean"
    UNDER_MEAN = "under-mean"
    MEAN = "mean"


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the coefficient-of-variation check for non-negative profits."""

    feasible: bool
    cv: float
    bound: float
    reason: str = ""


def validate_params(params: MarketParams) -> DerivedEconomics:
    """Check every model inequality and return the derived economics.

    Raises ParameterError with a distinct message per violated inequality.
    """
    for name in PARAM_KEYS:
        value = getattr(params, name)
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")
    r, c, nu, t = params.r, params.c, params.nu, params.t
    if nu >= c:
        raise ParameterError(f"nu = {nu} >= c = {c} violates nu < c < r")
    if c >= r:
        raise ParameterError(f"c = {c} >= r = {r} violates nu < c < r")
    if t < 0:
        raise ParameterError(f"t = {t} < 0: transport cost cannot be negative")
    if t >= r - nu:
        raise ParameterError(f"t = {t} >= r - nu = {r - nu}: transshipment can never pay")
    if params.sigma <= 0:
        raise ParameterError(f"sigma = {params.sigma} <= 0")
    if not -1.0 < params.rho <= 1.0:
        raise ParameterError(f"rho = {params.rho} outside (-1, 1]")
    g = r - c
    g_tilde = c - nu
    gamma = t / (r - nu)
    return DerivedEconomics(
        g=g,
        g_tilde=g_tilde,
        p=r - nu - t,
        R=g / (g + g_tilde),
        gamma=gamma,
        gamma_tilde=1.0 - gamma,
    )


def classify_game(econ: DerivedEconomics, tol: float = MEAN_GAME_TOL) -> GameType:
    """Over-mean, under-mean, or mean depending on the critical fractile R vs 1/2."""
    d = econ.R - 0.5
    if abs(d) <= tol:
        return GameType.MEAN
    return GameType.OVER_MEAN if d > 0 else GameType.UNDER_MEAN


def pooling_factor(n: int, rho: float) -> float:
    """Risk-pooling factor L_n = sqrt(n / (1 + (n-1)*rho)); L_1 = 1.

    Requires rho > -1/(n-1) for n >= 2 (positive-definite equicorrelation)
    and rho <= 1.
    """
    if n < 1:
        raise ParameterError(f"coalition size n must be >= 1, got {n}")
    if rho > 1.0:
        raise ParameterError(f"rho = {rho} > 1")
    denom = 1.0 + (n - 1) * rho
    if n >= 2 and denom <= 0.0:
        raise ParameterError(
            f"rho = {rho} <= -1/(n-1) = {-1.0 / (n - 1)}: "
            f"equicorrelation matrix not positive-definite for n = {n}"
        )
    return math.sqrt(n / denom)


def demand_feasibility_check(params: MarketParams) -> FeasibilityReport:
    """Check sigma/mu <= g / [(g + g_tilde) * phi(Phi^-1(R))].

    The bound keeps the probability mass on negative demands small enough
    that the closed-form profits stay non-negative. Requires mu > 0.
    """
    econ = validate_params(params)
    bound = econ.R / std_pdf(std_inv_cdf(econ.R))
    if params.mu <= 0:
        return FeasibilityReport(
            feasible=False, cv=math.inf, bound=bound,
            reason=f"mu = {params.mu} <= 0: coefficient of variation undefined",
        )
    cv = params.sigma / params.mu
    ok = cv <= bound
    return FeasibilityReport(
        feasible=ok, cv=cv, bound=bound,
        reason="" if ok else f"cv = {cv:.6g} exceeds bound {bound:.6g}",
    )


def params_from_mapping(mapping: Mapping[str, float]) -> MarketParams:
    """Build MarketParams from a mapping with keys r, c, nu, t, mu, sigma, rho."""
    missing = [k for k in PARAM_KEYS if k not in mapping]
    if missing:
        raise ParameterError(f"missing parameter(s): {', '.join(missing)}")
    unknown = [k for k in mapping if k not in PARAM_KEYS]
    if unknown:
        raise ParameterError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    return MarketParams(**{k: float(mapping[k]) for k in PARAM_KEYS})


def load_params(path: Union[str, Path]) -> MarketParams:
    """Read a flat key=value config file (keys r, c, nu, t, mu, sigma, rho).

    Blank lines and '#' comments are ignored. Values are parsed with float(),
    which is locale-independent and exact for decimal literals.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        try:
            values[key] = float(value.strip())
        except ValueError as exc:
            raise ParameterError(f"{path}:{lineno}: bad number for {key}: {value.strip()!r}") from exc
    return params_from_mapping(values)
