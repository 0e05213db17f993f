"""Resistive network solve and component loads.

Generators are voltage sources pinned at ``generator_voltage``; consumers
draw a fixed ``consumer_current``. Consumer voltages follow from Kirchhoff's
current law on the admittance-weighted Laplacian.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import GeneratorlessIslandError, SingularSystemError
from .grid import Grid, island_labels

RESIDUAL_TOL = 1e-9
# Above this many unknowns the reduced system is factored sparsely.
DENSE_LIMIT = 400


@dataclass(frozen=True)
class GenerationSpec:
    generator_voltage: float = 1.0
    consumer_current: float = 1.0

    def __post_init__(self):
        if not self.generator_voltage > 0:
            raise ValueError("generator_voltage must be positive")
        # zero demand is allowed: it is the degenerate no-load case
        if not self.consumer_current >= 0:
            raise ValueError("consumer_current must be non-negative")


@dataclass(frozen=True)
class LinearSystem:
    """One equation per surviving node, ordered as ``nodes``."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    nodes: np.ndarray
    n_nodes_total: int


@dataclass(frozen=True)
class PowerState:
    """Solved operating point, indexed like the grid (NaN for dead components)."""

    voltage: np.ndarray
    link_flow: np.ndarray
    component_load: np.ndarray

    @property
    def link_current(self):
        return np.abs(self.link_flow)


def generator_islands(grid: Grid):
    """Boolean mask of surviving nodes whose island contains a generator."""
    labels = island_labels(
        grid.n_nodes_total, grid.ends, grid.node_alive, grid.link_alive
    )
    return _energized(labels, grid.is_generator & grid.node_alive)


def _energized(labels, live_generators):
    powered = np.zeros(len(labels) + 1, dtype=bool)
    powered[labels[live_generators]] = True
    out = powered[labels]
    out[labels < 0] = False
    return out


def assemble_system(grid: Grid, spec: GenerationSpec = GenerationSpec()) -> LinearSystem:
    nodes = np.flatnonzero(grid.node_alive)
    if len(nodes) == 0:
        raise GeneratorlessIslandError("grid has no surviving nodes")
    energized = generator_islands(grid)
    if not energized[nodes].all():
        bad = nodes[~energized[nodes]][0]
        raise GeneratorlessIslandError(
            f"node {grid.node_ids[bad]!r} lies in a subgrid without a generator"
        )
    pos = np.full(grid.n_nodes_total, -1, dtype=np.intp)
    pos[nodes] = np.arange(len(nodes))
    links = np.flatnonzero(grid.link_alive)
    a = pos[grid.ends[links, 0]]
    b = pos[grid.ends[links, 1]]
    y = grid.admittance[links]

    k = len(nodes)
    gen = grid.is_generator[nodes]
    # generator rows are identity rows pinning the source voltage; consumer
    # rows carry the weighted Laplacian
    rows = np.r_[a, b, a, b]
    cols = np.r_[a, b, b, a]
    vals = np.r_[y, y, -y, -y]
    keep = ~gen[rows]
    pinned = np.flatnonzero(gen)
    matrix = sp.csr_matrix(
        (np.r_[vals[keep], np.ones(len(pinned))],
         (np.r_[rows[keep], pinned], np.r_[cols[keep], pinned])),
        shape=(k, k),
    )
    rhs = np.where(gen, spec.generator_voltage, -spec.consumer_current)
    return LinearSystem(matrix, rhs.astype(float), nodes, grid.n_nodes_total)


def solve_voltages(system: LinearSystem) -> np.ndarray:
    """Solve the assembled system; returns voltages over all node indices (NaN if dead)."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            v = spla.spsolve(system.matrix.tocsc(), system.rhs)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise SingularSystemError(str(exc)) from exc
    v = np.atleast_1d(v)
    scale = max(np.linalg.norm(system.rhs), 1e-300)
    resid = np.linalg.norm(system.matrix @ v - system.rhs) / scale
    if not np.isfinite(resid) or resid > RESIDUAL_TOL:
        raise SingularSystemError(f"relative residual {resid:.3g} above tolerance")
    out = np.full(system.n_nodes_total, np.nan)
    out[system.nodes] = v
    return out


def component_loads(grid: Grid, voltages) -> PowerState:
    voltages = np.asarray(voltages, dtype=float)
    flow, load = _loads(
        grid.ends, grid.admittance, grid.node_alive, grid.link_alive, voltages
    )
    return PowerState(voltages, flow, load)


def _loads(ends, admittance, node_alive, link_alive, voltage):
    n = len(node_alive)
    va = voltage[ends[:, 0]]
    vb = voltage[ends[:, 1]]
    flow = np.where(link_alive, (va - vb) * admittance, np.nan)
    f = np.where(link_alive, flow, 0.0)
    outflow = np.bincount(ends[:, 0], np.maximum(f, 0.0), minlength=n) + np.bincount(
        ends[:, 1], np.maximum(-f, 0.0), minlength=n
    )
    # magnitude keeps loads non-negative when heavy demand drives a voltage below zero
    node_load = np.where(node_alive, np.abs(np.nan_to_num(voltage)) * outflow, np.nan)
    return flow, np.concatenate([node_load, np.abs(flow)])


def network_state(grid: Grid, spec: GenerationSpec = GenerationSpec()) -> PowerState:
    """Assemble, solve and load a grid whose every island holds a generator."""
    return component_loads(grid, solve_voltages(assemble_system(grid, spec)))


def energized_loads(ends, admittance, is_generator, node_alive, link_alive,
                    energized, spec: GenerationSpec):
    """Loads on the energized part of a grid via the generator-reduced Laplacian.

    ``energized`` marks nodes in generator-bearing islands; everything else
    is reported dead. This is the hot path of the cascade, so it works on raw
    arrays and factors the (symmetric positive definite) consumer block
    directly instead of building the full per-node system.
    """
    n = len(node_alive)
    node_on = node_alive & energized
    link_on = link_alive & node_on[ends[:, 0]]
    voltage = np.full(n, np.nan)
    gen = node_on & is_generator
    voltage[gen] = spec.generator_voltage
    cons = np.flatnonzero(node_on & ~is_generator)
    if len(cons):
        voltage[cons] = _solve_consumers(
            ends, admittance, link_on, gen, cons, n, spec
        )
    flow, load = _loads(ends, admittance, node_on, link_on, voltage)
    return voltage, flow, load, node_on, link_on


def _solve_consumers(ends, admittance, link_on, gen, cons, n, spec):
    k = len(cons)
    pos = np.full(n, -1, dtype=np.intp)
    pos[cons] = np.arange(k)
    e = ends[link_on]
    y = admittance[link_on]
    pa, pb = pos[e[:, 0]], pos[e[:, 1]]
    diag = np.zeros(k)
    rhs = np.full(k, -spec.consumer_current)
    ca, cb = pa >= 0, pb >= 0
    np.add.at(diag, pa[ca], y[ca])
    np.add.at(diag, pb[cb], y[cb])
    # consumer-generator links move the pinned voltage to the right-hand side
    ga = ca & gen[e[:, 1]]
    gb = cb & gen[e[:, 0]]
    np.add.at(rhs, pa[ga], y[ga] * spec.generator_voltage)
    np.add.at(rhs, pb[gb], y[gb] * spec.generator_voltage)
    both = ca & cb
    try:
        if k <= DENSE_LIMIT:
            mat = np.zeros((k, k))
            mat[np.arange(k), np.arange(k)] = diag
            np.add.at(mat, (pa[both], pb[both]), -y[both])
            np.add.at(mat, (pb[both], pa[both]), -y[both])
            return scipy.linalg.cho_solve(
                scipy.linalg.cho_factor(mat, check_finite=False), rhs,
                check_finite=False,
            )
        mat = sp.coo_matrix(
            (
                np.r_[diag, -y[both], -y[both]],
                (np.r_[np.arange(k), pa[both], pb[both]],
                 np.r_[np.arange(k), pb[both], pa[both]]),
            ),
            shape=(k, k),
        ).tocsc()
        return spla.splu(mat).solve(rhs)
    except (np.linalg.LinAlgError, RuntimeError) as exc:
        raise SingularSystemError(str(exc)) from exc
