"""Second-stage transshipment recourse: the exact transportation solver.

After demands realize, surpluses H can be shipped toward shortages E; route
(i, j) earns the marginal profit p_ij per unit and shipping is optional. For
general agents this is a transportation problem solved here by successive
most-profitable augmenting paths; for identical agents it collapses to
p * min(sum(H), sum(E)).

All internal arithmetic uses `fractions.Fraction`. Float inputs are dyadic
rationals, so sums, minima, and products stay exact and the results round to
float exactly once at the end; the symmetric shortcut and the general solver
therefore agree bit-for-bit on uniform profit matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = [
    "GeneralAgentParams",
    "SurplusShortage",
    "TransshipmentPlan",
    "validate_general_params",
    "solve_transshipment_plan",
    "symmetric_recourse_value",
]


@dataclass(frozen=True)
class GeneralAgentParams:
    """Per-agent economics for heterogeneous agents.

    r, c, nu are per-agent prices/costs/salvage values; t is the n x n
    transport cost matrix with t[i][i] = 0. The marginal transshipment profit
    from i to j is p_ij = r_j - nu_i - t_ij.
    """

    r: tuple[float, ...]
    c: tuple[float, ...]
    nu: tuple[float, ...]
    t: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = len(self.r)
        if not (len(self.c) == len(self.nu) == n):
            raise ValueError("r, c, nu must have equal lengths")
        if len(self.t) != n or any(len(row) != n for row in self.t):
            raise ValueError(f"t must be an {n} x {n} matrix")

    @property
    def n(self) -> int:
        return len(self.r)

    def profit_matrix(self) -> list[list[float]]:
        return [
            [self.r[j] - self.nu[i] - self.t[i][j] for j in range(self.n)]
            for i in range(self.n)
        ]


def validate_general_params(params: GeneralAgentParams) -> list[str]:
    """Return every violated model inequality (1-based agent indices); empty if ok."""
    violations: list[str] = []
    n = params.n
    for i in range(n):
        if not params.nu[i] < params.c[i]:
            violations.append(f"nu < c violated at agent {i + 1}")
        if not params.c[i] < params.r[i]:
            violations.append(f"c < r violated at agent {i + 1}")
        if params.t[i][i] != 0.0:
            violations.append(f"t_ii = 0 violated at agent {i + 1}")
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if not params.c[i] < params.c[j] + params.t[j][i]:
                violations.append(f"c_i < c_j + t_ji violated at (i, j) = ({i + 1}, {j + 1})")
            if not params.nu[i] < params.nu[j] + params.t[j][i]:
                violations.append(f"nu_i < nu_j + t_ji violated at (i, j) = ({i + 1}, {j + 1})")
            if not params.r[i] < params.r[j] + params.t[j][i]:
                violations.append(f"r_i < r_j + t_ji violated at (i, j) = ({i + 1}, {j + 1})")
            if not params.t[i][j] < params.r[j] - params.nu[i]:
                violations.append(f"t_ij < r_j - nu_i violated at (i, j) = ({i + 1}, {j + 1})")
    return violations


@dataclass(frozen=True)
class SurplusShortage:
    """Realized per-agent surplus H and unmet demand E (mutually exclusive)."""

    surplus: tuple[float, ...]
    shortage: tuple[float, ...]

    def __post_init__(self):
        if len(self.surplus) != len(self.shortage):
            raise ValueError("surplus and shortage must have equal lengths")
        for i, (h, e) in enumerate(zip(self.surplus, self.shortage)):
            if not (math.isfinite(h) and math.isfinite(e)):
                raise ValueError(f"non-finite surplus/shortage at agent {i + 1}")
            if h < 0.0 or e < 0.0:
                raise ValueError(f"negative surplus/shortage at agent {i + 1}")
            if h > 0.0 and e > 0.0:
                raise ValueError(f"agent {i + 1} has both surplus and shortage")

    @classmethod
    def from_quantities(cls, quantities: Sequence[float], demands: Sequence[float]) -> "SurplusShortage":
        if len(quantities) != len(demands):
            raise ValueError("quantities and demands must have equal lengths")
        return cls(
            surplus=tuple(max(x - d, 0.0) for x, d in zip(quantities, demands)),
            shortage=tuple(max(d - x, 0.0) for x, d in zip(quantities, demands)),
        )


@dataclass(frozen=True)
class TransshipmentPlan:
    """An optimal shipping plan: W[i][j] units from i to j, and its profit."""

    shipments: tuple[tuple[float, ...], ...]
    objective: float


def symmetric_recourse_value(ss: SurplusShortage, p: float) -> float:
    """Recourse profit for identical agents: p * min(sum(H), sum(E)), p > 0."""
    if not p > 0.0:
        raise ValueError(f"marginal transshipment profit p must be positive, got {p}")
    total_h = sum(Fraction(h) for h in ss.surplus)
    total_e = sum(Fraction(e) for e in ss.shortage)
    return float(Fraction(p) * min(total_h, total_e))


def solve_transshipment_plan(ss: SurplusShortage, profit: Sequence[Sequence[float]]) -> TransshipmentPlan:
    """Maximize sum(p_ij * W_ij) s.t. row sums <= H, column sums <= E, W >= 0.

    Successive most-profitable augmenting paths on the bipartite residual
    graph; augmentation stops as soon as the best path profit is no longer
    strictly positive, so routes with p_ij <= 0 never carry flow. Ties
    between equal-profit paths resolve deterministically by index order.
    """
    n = len(ss.surplus)
    if len(profit) != n or any(len(row) != n for row in profit):
        raise ValueError(f"profit matrix must be {n} x {n}")
    for row in profit:
        for value in row:
            if not math.isfinite(value):
                raise ValueError("profit matrix entries must be finite")

    rem_h = [Fraction(h) for h in ss.surplus]
    rem_e = [Fraction(e) for e in ss.shortage]
    p = [[Fraction(v) for v in row] for row in profit]
    flow = [[Fraction(0)] * n for _ in range(n)]
    # Only positive-profit routes between a real surplus and a real shortage
    # can ever carry flow.
    arcs = [(i, j) for i in range(n) for j in range(n)
            if p[i][j] > 0 and ss.surplus[i] > 0.0 and ss.shortage[j] > 0.0]

    max_rounds = 4 * (len(arcs) + 2 * n) + 16
    for _ in range(max_rounds):
        path = _best_augmenting_path(n, arcs, p, flow, rem_h, rem_e)
        if path is None:
            break
        start, end, edges = path
        bottleneck = min(
            rem_h[start], rem_e[end],
            *(flow[i][j] for kind, i, j in edges if kind == "B"),
            )
        if bottleneck <= 0:
            break
        for kind, i, j in edges:
            if kind == "F":
                flow[i][j] += bottleneck
            else:
                flow[i][j] -= bottleneck
        rem_h[start] -= bottleneck
        rem_e[end] -= bottleneck
    else:
        raise RuntimeError("augmenting-path loop failed to terminate")

    # Row-major exact objective, rounded to float exactly once.
    objective = sum((p[i][j] * flow[i][j] for i in range(n) for j in range(n)),
                    start=Fraction(0))
    shipments = tuple(tuple(float(w) for w in row) for row in flow)
    return TransshipmentPlan(shipments=shipments, objective=float(objective))


def _best_augmenting_path(n, arcs, p, flow, rem_h, rem_e):
    """Most profitable residual path from spare surplus to spare shortage.

    Bellman-Ford on negated profits. Returns (start_agent, end_agent, edges)
    where edges is the forward/backward arc sequence, or None when no path
    with strictly positive profit remains. Successive shortest-path
    augmentation keeps the residual graph free of negative cycles.
    """
    dist_h: list[Fraction | None] = [Fraction(0) if rem_h[i] > 0 else None for i in range(n)]
    dist_e: list[Fraction | None] = [None] * n
    pred_h: list[tuple[int, int] | None] = [None] * n
    pred_e: list[tuple[int, int] | None] = [None] * n

    for _ in range(2 * n + 1):
        changed = False
        for i, j in arcs:
            if dist_h[i] is not None:
                cand = dist_h[i] - p[i][j]
                if dist_e[j] is None or cand < dist_e[j]:
                    dist_e[j] = cand
                    pred_e[j] = (i, j)
                    changed = True
            if flow[i][j] > 0 and dist_e[j] is not None:
                cand = dist_e[j] + p[i][j]
                if dist_h[i] is None or cand < dist_h[i]:
                    dist_h[i] = cand
                    pred_h[i] = (i, j)
                    changed = True
        if not changed:
            break
    else:
        raise RuntimeError("negative cycle detected in residual graph")

    end = None
    best: Fraction | None = None
    for j in range(n):
        if rem_e[j] > 0 and dist_e[j] is not None and (best is None or dist_e[j] < best):
            best = dist_e[j]
            end = j
    if end is None or best is None or -best <= 0:
        return None

    # Walk predecessors back from the chosen shortage to a spare surplus.
    edges: list[tuple[str, int, int]] = []
    j = end
    for _ in range(2 * len(arcs) + 2):
        i, _ = pred_e[j]
        edges.append(("F", i, j))
        if pred_h[i] is None:
            start = i
            break
        _, j = pred_h[i]
        edges.append(("B", i, j))
    else:
        raise RuntimeError("predecessor walk failed to reach an origin")
    edges.reverse()
    return start, end, edges
