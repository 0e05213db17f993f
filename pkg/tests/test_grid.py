import numpy as np
import pytest

from gridattack.exceptions import (
    DanglingEndpointError,
    DuplicateNodeError,
    InvalidComponentError,
    IsolatedNodeError,
    NonPositiveAdmittanceError,
    ParallelLinkError,
    SelfLoopError,
)
from gridattack.grid import build_grid, connected_subgrids, remove_components

from conftest import random_grid, two_node


def test_two_node_counts(grid2):
    assert (grid2.N, grid2.M, grid2.D) == (2, 1, 3)
    assert grid2.component_kind(0) == "generator"
    assert grid2.component_kind(1) == "consumer"
    assert grid2.component_kind(2) == "link"
    assert grid2.component_label(2) == "g-c"


def test_explicit_link_ids():
    g = build_grid([("a", True), ("b", False)], [("L1", "a", "b", 2.0)])
    assert g.link_ids == ("L1",)
    assert g.find_link("b", "a") == 2


@pytest.mark.parametrize("nodes, links, error", [
    ([("a", 1), ("a", 0)], [("a", "a", 1.0)], DuplicateNodeError),
    ([("a", 1), ("b", 0)], [("a", "z", 1.0)], DanglingEndpointError),
    ([("a", 1), ("b", 0)], [("a", "b", 0.0)], NonPositiveAdmittanceError),
    ([("a", 1), ("b", 0)], [("a", "b", -1.0)], NonPositiveAdmittanceError),
    ([("a", 1), ("b", 0)], [("a", "b", float("nan"))], NonPositiveAdmittanceError),
    ([("a", 1), ("b", 0)], [("a", "a", 1.0)], SelfLoopError),
    ([("a", 1), ("b", 0)], [("a", "b", 1.0), ("b", "a", 2.0)], ParallelLinkError),
    ([("a", 1), ("b", 0), ("c", 0)], [("a", "b", 1.0)], IsolatedNodeError),
])
def test_build_errors(nodes, links, error):
    with pytest.raises(error):
        build_grid(nodes, links)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        build_grid([("a", 1), ("b", 0)], [("a", "b", 0.0)])


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_grid([("a", "turbine")], [])


def test_grid_is_immutable(grid2):
    with pytest.raises(ValueError):
        grid2.admittance[0] = 5.0
    with pytest.raises(Exception):
        grid2.node_ids = ("x",)


def test_remove_single_link(grid2):
    r = remove_components(grid2, [2])
    assert (r.N, r.M, r.D) == (2, 0, 2)
    assert grid2.D == 3


def test_remove_degree_three_node():
    g = build_grid(
        [("h", 0), ("a", 1), ("b", 0), ("c", 0)],
        [("h", "a", 1.0), ("h", "b", 1.0), ("h", "c", 1.0), ("a", "b", 1.0)],
    )
    r = remove_components(g, [0])
    assert (r.N, r.M) == (g.N - 1, g.M - 3)
    assert r.link_alive.tolist() == [False, False, False, True]


def test_remove_node_and_incident_link_same_as_node(grid2):
    a = remove_components(grid2, [1, 2])
    b = remove_components(grid2, [1])
    assert np.array_equal(a.alive, b.alive)


def test_remove_invalid_id(grid2):
    with pytest.raises(InvalidComponentError):
        remove_components(grid2, [3])
    with pytest.raises(IndexError):
        remove_components(grid2, [-1])


def test_indices_stable_across_removals():
    g = random_grid(3)
    r = remove_components(g, [1, g.n_nodes_total + 2])
    assert r.size == g.size
    for c in r.surviving():
        assert r.component_label(c) == g.component_label(c)


def test_removal_composes():
    g = random_grid(5)
    A = [0, g.n_nodes_total + 4]
    B = [2, 3]
    lhs = remove_components(g, A + B)
    rhs = remove_components(remove_components(g, A), B)
    assert np.array_equal(lhs.alive, rhs.alive)


def test_subgrids_path():
    g = build_grid([("a", 1), ("b", 0), ("c", 0)], [("a", "b", 1.0), ("b", "c", 1.0)])
    assert connected_subgrids(g) == [frozenset({0, 1, 2, 3, 4})]


def test_subgrids_two_pairs():
    g = build_grid(
        [("a", 1), ("b", 0), ("c", 1), ("d", 0)], [("a", "b", 1.0), ("c", "d", 1.0)]
    )
    assert connected_subgrids(g) == [frozenset({0, 1, 4}), frozenset({2, 3, 5})]


def test_subgrids_empty():
    assert connected_subgrids(build_grid([], [])) == []
    g = remove_components(two_node(), [0, 1])
    assert connected_subgrids(g) == []


def test_subgrids_partition_survivors():
    for seed in range(10):
        g = random_grid(seed)
        rng = np.random.default_rng(seed)
        r = remove_components(g, rng.choice(g.size, 4, replace=False))
        parts = connected_subgrids(r)
        members = [c for p in parts for c in p]
        assert sorted(members) == r.surviving().tolist()
        where = {c: k for k, p in enumerate(parts) for c in p}
        for link in np.flatnonzero(r.link_alive):
            a, b = r.ends[link]
            c = r.n_nodes_total + link
            assert where[c] == where[a] == where[b]


def test_with_admittance(grid2):
    g = grid2.with_admittance([4.0])
    assert g.admittance.tolist() == [4.0]
    with pytest.raises(NonPositiveAdmittanceError):
        grid2.with_admittance([0.0])
