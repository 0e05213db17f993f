"""One-shot greedy and random attackers under a cost budget."""

from __future__ import annotations

import numpy as np

from .attack_model import AttackSolution, CentralityTable, CostTable, make_solution, within_budget

SKIP = "skip"
STOP = "stop"


def budget_fill(order, cost, budget, fill=SKIP):
    """Walk ``order`` and take every component that still fits the budget.

    With ``fill="stop"`` the walk ends at the first component that does not fit.
    """
    selected = np.zeros(len(cost), dtype=bool)
    spent = 0.0
    for c in order:
        if within_budget(spent + cost[c], budget):
            selected[c] = True
            spent += cost[c]
        elif fill == STOP:
            break
    return selected


def centrality_order(psi, cost):
    """Decreasing centrality; ties go to the cheaper, then the lower index."""
    live = np.flatnonzero(np.isfinite(psi))
    keys = np.lexsort((live, cost[live], -psi[live]))
    return live[keys]


def greedy_attack(centrality: CentralityTable, costs: CostTable, budget: float,
                  fill: str = SKIP) -> AttackSolution:
    if budget < 0:
        raise ValueError("budget must be non-negative")
    order = centrality_order(centrality.psi, costs.cost)
    return make_solution(budget_fill(order, costs.cost, budget, fill), costs, budget)


def random_attack(costs: CostTable, budget: float, rng) -> AttackSolution:
    if budget < 0:
        raise ValueError("budget must be non-negative")
    rng = np.random.default_rng(rng)
    live = np.flatnonzero(np.isfinite(costs.cost))
    order = rng.permutation(live)
    return make_solution(budget_fill(order, costs.cost, budget), costs, budget)
