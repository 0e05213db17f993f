import numpy as np
import pytest

from gridattack.cascade import (
    ATTACKED,
    DETACHED,
    ISLANDED,
    OVERLOAD,
    damage,
    damage_fraction,
    initial_capacities,
    simulate_cascade,
)
from gridattack.exceptions import InvalidComponentError, ValidationError
from gridattack.grid import connected_subgrids, remove_components
from gridattack.power_flow import GenerationSpec, network_state

from conftest import random_grid


def naive_cascade(grid, capacity, attacked):
    """Reference cascade on the public grid API: one full solve per round."""
    g = remove_components(grid, attacked)
    unserved = set(int(c) for c in attacked) | set(np.flatnonzero(grid.alive & ~g.alive).tolist())
    while True:
        dead = set()
        for part in connected_subgrids(g):
            nodes = [c for c in part if c < g.n_nodes_total]
            if not g.is_generator[nodes].any():
                dead |= set(part)
        powered = remove_components(g, [c for c in dead if c < g.n_nodes_total])
        if powered.N:
            load = network_state(powered).component_load
            for c in powered.surviving():
                if load[c] > capacity[c] + 1e-9:
                    dead.add(int(c))
        if not dead:
            return unserved
        nxt = remove_components(g, dead)
        unserved |= set(np.flatnonzero(g.alive & ~nxt.alive).tolist())
        g = nxt


def test_capacities_two_node(grid2):
    cap = initial_capacities(grid2, alpha=0.2, beta=0.2)
    assert cap.capacity[2] == pytest.approx(1.2, abs=1e-12)
    assert cap.capacity[0] == pytest.approx(1.2, abs=1e-12)
    assert cap.capacity[1] == 0.0


def test_capacities_zero_demand():
    g = random_grid(3)
    cap = initial_capacities(g, GenerationSpec(consumer_current=0.0))
    assert np.allclose(cap.capacity, 0.0)


def test_capacities_zero_margin_equal_load():
    g = random_grid(3)
    cap = initial_capacities(g, alpha=0.0, beta=0.0)
    assert np.allclose(cap.capacity, network_state(g).component_load, rtol=1e-10, atol=1e-12)


def test_capacity_floor(grid2):
    cap = initial_capacities(grid2, floor=0.5)
    assert cap.capacity[1] == 0.5


def test_negative_margin_rejected(grid2):
    with pytest.raises(ValidationError):
        initial_capacities(grid2, alpha=-0.1)


def test_capacities_toy4(toy4):
    cap = initial_capacities(toy4)
    assert cap.capacity.tolist() == pytest.approx([3.6, 1.68, 0.6, 0.0, 3.6, 2.4, 1.2])


def test_attack_nothing(toy4):
    res = simulate_cascade(toy4, initial_capacities(toy4), [])
    assert res.rounds == ((),)
    assert res.unserved == frozenset()
    assert damage(res) == 0.0


def test_attack_only_generator(toy4):
    res = simulate_cascade(toy4, initial_capacities(toy4), [0])
    assert res.unserved == frozenset(range(toy4.D))
    assert res.damage == 1.0


def test_toy4_link_attack_islands_tail(toy4):
    res = simulate_cascade(toy4, initial_capacities(toy4), [5])
    assert res.rounds == ((5,), (2, 3, 6))
    assert all(res.causes[c] == ISLANDED for c in (2, 3, 6))
    assert res.causes[5] == ATTACKED
    assert res.damage == pytest.approx(3 / 6)


def test_node_attack_detaches_links(toy4):
    res = simulate_cascade(toy4, initial_capacities(toy4), [2])
    assert res.rounds[0] == (2,)
    assert res.causes[5] == DETACHED and res.causes[6] == DETACHED
    assert res.causes[3] == ISLANDED
    assert res.n_attacked == 1


def test_overload_cause():
    from gridattack.grid import build_grid

    g = build_grid(
        [("g", 1), ("a", 0), ("b", 0)],
        [("g", "a", 10.0), ("g", "b", 10.0), ("a", "b", 10.0)],
    )
    res = simulate_cascade(g, initial_capacities(g), [3])
    assert res.rounds == ((3,), (2, 4, 5), (1,))
    assert [res.causes[c] for c in (2, 4, 5)] == [OVERLOAD] * 3
    assert res.causes[1] == ISLANDED
    assert res.damage == pytest.approx(4 / 5)


def test_trace_records(toy4):
    res = simulate_cascade(toy4, initial_capacities(toy4), [2])
    trace = res.trace()
    assert trace[0] == (0, ATTACKED, (2,))
    assert {r[1] for r in trace[1:]} == {ISLANDED, DETACHED}


def test_invalid_attack(toy4, grid2):
    cap = initial_capacities(toy4)
    with pytest.raises(InvalidComponentError):
        simulate_cascade(toy4, cap, [7])
    cut = remove_components(toy4, [5])
    with pytest.raises(InvalidComponentError):
        simulate_cascade(cut, cap, [5])


def test_max_rounds(toy4):
    g = random_grid(11)
    cap = initial_capacities(g)
    full = simulate_cascade(g, cap, [0])
    one = simulate_cascade(g, cap, [0], max_rounds=1)
    assert one.rounds == full.rounds[:2]


@pytest.mark.parametrize("seed", range(15))
def test_matches_naive_reference(seed):
    g = random_grid(seed, max_nodes=20)
    cap = initial_capacities(g).capacity
    rng = np.random.default_rng(seed)
    attacked = rng.choice(g.size, int(rng.integers(1, 4)), replace=False)
    res = simulate_cascade(g, initial_capacities(g), attacked)
    assert res.unserved == naive_cascade(g, cap, attacked)


def test_rounds_disjoint_and_deterministic():
    g = random_grid(8)
    cap = initial_capacities(g)
    a = simulate_cascade(g, cap, [1, 2, g.n_nodes_total])
    b = simulate_cascade(g, cap, [g.n_nodes_total, 2, 1])
    assert a.rounds == b.rounds
    flat = [c for r in a.rounds for c in r]
    assert len(flat) == len(set(flat))
    assert set(a.rounds[0]) <= a.unserved


@pytest.mark.parametrize("unserved, attacked, D, expected", [
    (6, 2, 10, 0.5),
    (2, 2, 10, 0.0),
    (10, 2, 10, 1.0),
    (0, 0, 5, 0.0),
    (5, 0, 5, 1.0),
    (3, 1, 4, 2 / 3),
])
def test_damage_formula(unserved, attacked, D, expected):
    assert damage_fraction(unserved, attacked, D) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("unserved, attacked, D", [(5, 5, 5), (1, 2, 5), (6, 1, 5), (0, -1, 5)])
def test_damage_rejects(unserved, attacked, D):
    with pytest.raises(ValidationError):
        damage_fraction(unserved, attacked, D)


def test_attack_everything_rejected(grid2):
    res = simulate_cascade(grid2, initial_capacities(grid2), [0, 1, 2])
    with pytest.raises(ValidationError):
        res.damage
