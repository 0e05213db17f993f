import numpy as np
import pytest

from gridattack.exceptions import GeneratorlessIslandError
from gridattack.grid import build_grid, remove_components
from gridattack.power_flow import (
    GenerationSpec,
    assemble_system,
    component_loads,
    energized_loads,
    generator_islands,
    network_state,
    solve_voltages,
)

from conftest import random_grid


def dense_oracle(grid, spec=GenerationSpec()):
    """Dense Dirichlet solve of the Laplacian, written independently of the package."""
    n = grid.n_nodes_total
    L = np.zeros((n, n))
    for (a, b), y, on in zip(grid.ends, grid.admittance, grid.link_alive):
        if on:
            L[a, a] += y
            L[b, b] += y
            L[a, b] -= y
            L[b, a] -= y
    gen = grid.is_generator
    cons = np.flatnonzero(~gen)
    v = np.full(n, spec.generator_voltage)
    rhs = -spec.consumer_current - L[np.ix_(cons, np.flatnonzero(gen))] @ v[gen]
    v[cons] = np.linalg.solve(L[np.ix_(cons, cons)], rhs)
    return v


def test_two_node_assembly(grid2):
    s = assemble_system(grid2)
    assert s.matrix.toarray().tolist() == [[1.0, 0.0], [-10.0, 10.0]]
    assert s.rhs.tolist() == [1.0, -1.0]


def test_two_node_solution(grid2):
    v = solve_voltages(assemble_system(grid2))
    assert v[0] == 1.0
    assert v[1] == pytest.approx(0.9, abs=1e-12)
    st = component_loads(grid2, v)
    assert st.component_load[2] == pytest.approx(1.0, abs=1e-12)
    assert st.component_load[0] == pytest.approx(1.0, abs=1e-12)
    assert st.component_load[1] == 0.0


def test_star(grid_star):
    st = network_state(grid_star)
    assert st.voltage[1:].tolist() == pytest.approx([0.9, 0.9], abs=1e-12)
    assert st.component_load[0] == pytest.approx(2.0, abs=1e-12)


def test_zero_load_gives_flat_voltage():
    g = random_grid(1)
    st = network_state(g, GenerationSpec(consumer_current=0.0))
    assert np.allclose(st.voltage, 1.0, atol=1e-12)
    assert np.allclose(st.component_load, 0.0, atol=1e-12)


def test_generator_voltage_pinned():
    g = random_grid(2)
    st = network_state(g, GenerationSpec(generator_voltage=1.3))
    assert np.all(st.voltage[g.is_generator] == 1.3)


def test_single_generator_no_links(grid2):
    lone = remove_components(grid2, [1])
    s = assemble_system(lone)
    assert s.matrix.toarray().tolist() == [[1.0]]
    assert solve_voltages(s)[0] == 1.0


def test_generatorless_island_rejected(grid2):
    cut = remove_components(grid2, [2])
    with pytest.raises(GeneratorlessIslandError):
        assemble_system(cut)
    assert generator_islands(cut).tolist() == [True, False]


def test_spec_validation():
    with pytest.raises(ValueError):
        GenerationSpec(generator_voltage=0.0)
    with pytest.raises(ValueError):
        GenerationSpec(consumer_current=-1.0)


@pytest.mark.parametrize("seed", range(10))
def test_matches_dense_oracle(seed):
    g = random_grid(seed)
    assert np.allclose(network_state(g).voltage, dense_oracle(g), atol=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_reduced_solver_matches_full_system(seed):
    g = random_grid(seed)
    full = network_state(g)
    v, flow, load, node_on, link_on = energized_loads(
        g.ends, g.admittance, g.is_generator, g.node_alive, g.link_alive,
        np.ones(g.n_nodes_total, dtype=bool), GenerationSpec(),
    )
    assert node_on.all() and link_on.all()
    assert np.allclose(v, full.voltage, atol=1e-10)
    assert np.allclose(load, full.component_load, atol=1e-10)


def test_sparse_path_matches_dense(monkeypatch):
    import gridattack.power_flow as pf

    g = random_grid(7)
    dense = pf.network_state(g).voltage
    args = (g.ends, g.admittance, g.is_generator, g.node_alive, g.link_alive,
            np.ones(g.n_nodes_total, dtype=bool), GenerationSpec())
    monkeypatch.setattr(pf, "DENSE_LIMIT", 0)
    sparse = pf.energized_loads(*args)[0]
    assert np.allclose(sparse, dense, atol=1e-10)


def test_scaling_covariance():
    g = random_grid(4)
    a = network_state(g)
    b = network_state(g.with_admittance(2 * g.admittance))
    gen_v = 1.0
    assert np.allclose(gen_v - b.voltage, (gen_v - a.voltage) / 2, atol=1e-12)
    assert np.allclose(b.link_flow, a.link_flow, atol=1e-10)


def test_symmetry_under_node_permutation():
    g = build_grid(
        [("g", 1), ("a", 0), ("b", 0), ("x", 0)],
        [("g", "a", 5.0), ("g", "b", 5.0), ("a", "x", 3.0), ("b", "x", 3.0)],
    )
    v = network_state(g).voltage
    assert v[1] == pytest.approx(v[2], abs=1e-14)


def test_loads_non_negative():
    for seed in range(5):
        assert (network_state(random_grid(seed)).component_load >= 0).all()


def test_sink_consumer_has_zero_outflow(grid_star):
    st = network_state(grid_star)
    assert st.component_load[1] == 0.0 and st.component_load[2] == 0.0
