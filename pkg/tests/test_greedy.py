import numpy as np
import pytest

from gridattack.attack_model import GLOBAL, LOCAL, AttackContext, CentralityTable
from gridattack.greedy import STOP, budget_fill, centrality_order, greedy_attack, random_attack

from conftest import random_grid


def leftover_fits(sol, costs):
    left = sol.budget - sol.cost
    free = ~sol.selected & np.isfinite(costs.cost)
    return bool((costs.cost[free] <= left).any())


def test_zero_budget(grid2):
    ctx = AttackContext.build(grid2)
    sol = greedy_attack(ctx.centrality(GLOBAL), ctx.costs, 0.0)
    assert len(sol) == 0 and sol.cost == 0.0


def test_full_budget_takes_everything():
    ctx = AttackContext.build(random_grid(1))
    sol = greedy_attack(ctx.centrality(LOCAL), ctx.costs, ctx.budget(1.0))
    assert sol.selected.all()
    sol = random_attack(ctx.costs, ctx.budget(1.0), 3)
    assert sol.selected.all()


def test_two_node_generator_first(grid2):
    ctx = AttackContext.build(grid2)
    sol = greedy_attack(ctx.centrality(GLOBAL), ctx.costs, 3.0)
    assert sol.components.tolist() == [0]


def test_tie_break_cheaper_then_index():
    psi = np.array([1.0, 2.0, 2.0, 2.0, np.nan])
    cost = np.array([1.0, 5.0, 3.0, 3.0, np.nan])
    assert centrality_order(psi, cost).tolist() == [2, 3, 1, 0]


def test_skip_versus_stop():
    cost = np.array([5.0, 1.0, 1.0])
    order = [0, 1, 2]
    assert budget_fill(order, cost, 2.0).tolist() == [False, True, True]
    assert budget_fill(order, cost, 2.0, STOP).tolist() == [False, False, False]


@pytest.mark.parametrize("seed", range(8))
def test_feasible_and_maximal(seed):
    ctx = AttackContext.build(random_grid(seed))
    for theta in (0.05, 0.2, 0.5):
        B = ctx.budget(theta)
        for sol in (greedy_attack(ctx.centrality(LOCAL), ctx.costs, B),
                    greedy_attack(ctx.centrality(GLOBAL), ctx.costs, B),
                    random_attack(ctx.costs, B, seed)):
            assert sol.feasible
            assert not leftover_fits(sol, ctx.costs)


def test_greedy_deterministic_and_table_only_difference():
    ctx = AttackContext.build(random_grid(4))
    B = ctx.budget(0.2)
    a = greedy_attack(ctx.centrality(LOCAL), ctx.costs, B)
    b = greedy_attack(CentralityTable(np.array(ctx.centrality(LOCAL).psi), GLOBAL), ctx.costs, B)
    assert np.array_equal(a.selected, b.selected)


def test_random_seeded():
    ctx = AttackContext.build(random_grid(4))
    B = ctx.budget(0.3)
    a, b = random_attack(ctx.costs, B, 7), random_attack(ctx.costs, B, 7)
    assert np.array_equal(a.selected, b.selected)
    assert len(random_attack(ctx.costs, 0.0, 7)) == 0


def test_negative_budget(grid2):
    ctx = AttackContext.build(grid2)
    with pytest.raises(ValueError):
        greedy_attack(ctx.centrality(LOCAL), ctx.costs, -1.0)
