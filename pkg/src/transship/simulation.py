"""Monte Carlo validation: correlated demand sampling and estimators.

Each closed form in the library has an independent check here: sampled
equicorrelated normal demands feed estimators of the coalition profit and
the expected transshipment amount, and a grid search over the profit curve
double-checks the root-found optimal quantity.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .analytic_solver import _profit_at
from .game_model import MarketParams, ParameterError, pooling_factor, validate_params

__all__ = [
    "RNG_ALGORITHM",
    "DemandMatrix",
    "McEstimate",
    "sample_demands",
    "estimate_profit",
    "estimate_transshipment",
    "brute_force_optimal",
    "dump_scenarios",
]

# Counter-based generator: reproducible across runs and machines for a fixed
# seed, and recorded in every DemandMatrix for auditability.
RNG_ALGORITHM = "numpy-philox4x64"


@dataclass(frozen=True, eq=False)
class DemandMatrix:
    """Sampled joint demand scenarios: one row per draw, one column per agent."""

    scenarios: np.ndarray
    seed: int
    rho_target: float
    rng_algorithm: str = RNG_ALGORITHM

    @property
    def count(self) -> int:
        return self.scenarios.shape[0]

    @property
    def n(self) -> int:
        return self.scenarios.shape[1]


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error."""

    mean: float
    std_error: float
    count: int


def sample_demands(n: int, mu: float, sigma: float, rho: float,
                   count: int, seed: int) -> DemandMatrix:
    """Draw `count` independent scenarios from the equicorrelated n-variate normal.

    Mean mu * 1, covariance sigma^2 * [(1 - rho) I + rho 11^T]; requires
    sigma > 0 and -1/(n-1) < rho <= 1. Identical (seed, arguments) give a
    bit-identical matrix.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if sigma <= 0:
        raise ParameterError(f"sigma = {sigma} <= 0")
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    if not -1.0 < rho <= 1.0:
        raise ParameterError(f"rho = {rho} outside (-1, 1]")
    if n >= 2 and rho <= -1.0 / (n - 1):
        raise ParameterError(
            f"rho = {rho} <= -1/(n-1) = {-1.0 / (n - 1)}: covariance not positive-definite"
        )
    rng = np.random.Generator(np.random.Philox(key=seed))
    if rho == 1.0:
        # Perfect correlation: one draw per scenario, shared by all agents.
        z = rng.standard_normal((count, 1))
        draws = np.repeat(z, n, axis=1)
    else:
        z = rng.standard_normal((count, n))
        corr = (1.0 - rho) * np.eye(n) + rho * np.ones((n, n))
        lower = np.linalg.cholesky(corr)
        draws = z @ lower.T
    return DemandMatrix(scenarios=mu + sigma * draws, seed=seed, rho_target=rho)


def _summarize(values: np.ndarray) -> McEstimate:
    count = values.shape[0]
    if count < 2:
        raise ValueError("at least 2 scenarios are needed for a standard error")
    return McEstimate(
        mean=float(values.mean()),
        std_error=float(values.std(ddof=1) / math.sqrt(count)),
        count=count,
    )


def estimate_profit(x: float, samples: DemandMatrix, params: MarketParams) -> McEstimate:
    """Monte Carlo estimate of the coalition profit at common quantity x.

    Per scenario: sum_i [r min(x, D_i) + nu H_i - c x] plus the pooled
    recourse profit p * min(sum H, sum E) (the identical-agent shortcut,
    vectorized; its agreement with the general transportation solver is
    checked separately).
    """
    econ = validate_params(params)
    demands = samples.scenarios
    surplus = np.maximum(x - demands, 0.0)
    shortage = np.maximum(demands - x, 0.0)
    stage_one = (params.r * np.minimum(x, demands) + params.nu * surplus - params.c * x).sum(axis=1)
    recourse = econ.p * np.minimum(surplus.sum(axis=1), shortage.sum(axis=1))
    return _summarize(stage_one + recourse)


def estimate_transshipment(x: float, samples: DemandMatrix) -> McEstimate:
    """Monte Carlo estimate of the transshipped amount min(sum H, sum E) at x."""
    demands = samples.scenarios
    surplus = np.maximum(x - demands, 0.0).sum(axis=1)
    shortage = np.maximum(demands - x, 0.0).sum(axis=1)
    return _summarize(np.minimum(surplus, shortage))


def brute_force_optimal(params: MarketParams, n: int, grid_half_width: float,
                        grid_points: int) -> tuple[float, float]:
    """Maximize the closed-form profit on a grid around the demand mean.

    Evaluates J_n on grid_points equally spaced quantities in
    [mu - w*sigma, mu + w*sigma] and returns (best x, best profit). Grid
    search is method-independent of the root-finder, so agreement within one
    grid spacing validates both the first-order condition and its solver.
    """
    econ = validate_params(params)
    if grid_points < 3 or grid_points % 2 == 0:
        raise ValueError(f"grid_points must be an odd integer >= 3, got {grid_points}")
    if grid_half_width <= 0:
        raise ValueError(f"grid_half_width must be positive, got {grid_half_width}")
    L = pooling_factor(n, params.rho)
    mu, sigma, t = params.mu, params.sigma, params.t
    ys = np.linspace(-grid_half_width, grid_half_width, grid_points)
    best_y = ys[0]
    best_profit = -math.inf
    for y in ys:
        value = _profit_at(float(y), n, L, econ, mu, sigma, t)
        if value > best_profit:
            best_profit = value
            best_y = float(y)
    return mu + sigma * best_y, best_profit


def dump_scenarios(samples: DemandMatrix, path: Union[str, Path]) -> None:
    """Write scenarios to CSV (scenario_id, D_1..D_n) at full precision."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["scenario_id"] + [f"D_{j + 1}" for j in range(samples.n)])
        for idx, row in enumerate(samples.scenarios):
            writer.writerow([idx] + [repr(float(d)) for d in row])
