"""Attack costs, budgets, and cost-weighted attack centrality."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cascade import CapacityTable, initial_capacities, simulate_cascade
from .exceptions import ValidationError
from .grid import Grid
from .power_flow import GenerationSpec

LOCAL = "local"
GLOBAL = "global"
SCOPES = (LOCAL, GLOBAL)

# slack on budget comparisons so summation order cannot flip feasibility
BUDGET_RTOL = 1e-12


@dataclass(frozen=True)
class CostTable:
    cost: np.ndarray
    gamma: float

    @property
    def total(self) -> float:
        return math.fsum(self.cost[np.isfinite(self.cost)])


def attack_costs(grid: Grid, gamma: float = 0.3) -> CostTable:
    """Link cost is ``gamma * admittance``; a node costs the sum of its incident links."""
    if not gamma > 0:
        raise ValidationError("gamma must be positive")
    link_cost = gamma * grid.admittance
    n0 = grid.n_nodes_total
    node_cost = np.bincount(grid.ends[:, 0], link_cost, minlength=n0) + np.bincount(
        grid.ends[:, 1], link_cost, minlength=n0
    )
    cost = np.r_[node_cost, link_cost]
    cost[~grid.alive] = np.nan
    cost.setflags(write=False)
    return CostTable(cost, float(gamma))


def total_budget(costs: CostTable, theta: float) -> float:
    if not 0.0 <= theta <= 1.0:
        raise ValidationError(f"theta must lie in [0, 1], got {theta}")
    return theta * costs.total


def within_budget(spent: float, budget: float) -> bool:
    return spent <= budget + BUDGET_RTOL * max(1.0, abs(budget))


@dataclass(frozen=True)
class AttackSolution:
    selected: np.ndarray
    cost: float
    budget: float

    @property
    def feasible(self) -> bool:
        return within_budget(self.cost, self.budget)

    @property
    def components(self) -> np.ndarray:
        return np.flatnonzero(self.selected)

    def __len__(self):
        return int(self.selected.sum())


def solution_cost(selected, costs: CostTable) -> float:
    selected = np.asarray(selected)
    if selected.shape != costs.cost.shape:
        raise ValidationError(
            f"solution has length {selected.size}, expected {costs.cost.size}"
        )
    chosen = costs.cost[selected.astype(bool)]
    if np.isnan(chosen).any():
        raise ValidationError("solution selects a removed component")
    return math.fsum(chosen)


def is_feasible(selected, costs: CostTable, budget: float) -> bool:
    return within_budget(solution_cost(selected, costs), budget)


def make_solution(selected, costs: CostTable, budget: float) -> AttackSolution:
    selected = np.asarray(selected, dtype=bool)
    selected.setflags(write=False)
    return AttackSolution(selected, solution_cost(selected, costs), float(budget))


@dataclass(frozen=True)
class CentralityTable:
    psi: np.ndarray
    scope: str


def attack_centrality(grid: Grid, capacities: CapacityTable, costs: CostTable,
                      component: int, scope: str = GLOBAL,
                      include_self: bool = False) -> float:
    """Cost of everything knocked out by removing ``component``, per unit of its own cost.

    ``scope="local"`` counts only the first recompute-and-remove round of the
    cascade; ``"global"`` counts the whole cascade.
    """
    if scope not in SCOPES:
        raise ValidationError(f"scope must be one of {SCOPES}")
    result = simulate_cascade(
        grid, capacities, [component], max_rounds=1 if scope == LOCAL else None
    )
    failed = [c for r in result.rounds[1:] for c in r]
    if include_self:
        failed.append(int(component))
    return math.fsum(costs.cost[failed]) / costs.cost[component]


def centrality_table(grid: Grid, capacities: CapacityTable, costs: CostTable,
                     scope: str = GLOBAL, include_self: bool = False) -> CentralityTable:
    psi = np.full(grid.size, np.nan)
    for c in grid.surviving():
        psi[c] = attack_centrality(grid, capacities, costs, c, scope, include_self)
    psi.setflags(write=False)
    return CentralityTable(psi, scope)


@dataclass
class AttackContext:
    """A grid with its capacities and costs, plus lazily computed centralities.

    Shared by every attacker run against the same admittance realization.
    """

    grid: Grid
    capacities: CapacityTable
    costs: CostTable
    include_self: bool = False
    _tables: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, grid: Grid, alpha=0.2, beta=0.2, gamma=0.3,
              spec: GenerationSpec = GenerationSpec(), capacity_floor=0.0,
              include_self=False):
        capacities = initial_capacities(grid, spec, alpha, beta, capacity_floor)
        return cls(grid, capacities, attack_costs(grid, gamma), include_self)

    def centrality(self, scope: str) -> CentralityTable:
        if scope not in self._tables:
            self._tables[scope] = centrality_table(
                self.grid, self.capacities, self.costs, scope, self.include_self
            )
        return self._tables[scope]

    def budget(self, theta: float) -> float:
        return total_budget(self.costs, theta)

    def cascade(self, selected):
        return simulate_cascade(self.grid, self.capacities, np.flatnonzero(selected))

    def damage(self, selected) -> float:
        return self.cascade(selected).damage
