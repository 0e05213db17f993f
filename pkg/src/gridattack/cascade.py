"""Overload-driven cascading failure and the damage it causes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .exceptions import (
    GeneratorlessIslandError,
    InvalidComponentError,
    ValidationError,
)
from .grid import Grid, island_labels, removal_masks
from .power_flow import GenerationSpec, _energized, energized_loads

OVERLOAD_TOL = 1e-9

ATTACKED = "attacked"
OVERLOAD = "overload"
ISLANDED = "islanded"
# links lost because an endpoint node went down in the same round
DETACHED = "detached"


@dataclass(frozen=True)
class CapacityTable:
    capacity: np.ndarray
    alpha: float
    beta: float
    spec: GenerationSpec = GenerationSpec()
    initial_load: np.ndarray = field(default=None, repr=False)


def initial_capacities(grid: Grid, spec: GenerationSpec = GenerationSpec(),
                       alpha: float = 0.2, beta: float = 0.2,
                       floor: float = 0.0) -> CapacityTable:
    """Capacities as ``(1 + margin) * load`` on the undamaged grid.

    ``floor`` is a lower bound applied to every capacity; the default of zero
    leaves unloaded components with zero capacity.
    """
    if alpha < 0 or beta < 0:
        raise ValidationError("safety margins must be non-negative")
    labels = island_labels(grid.n_nodes_total, grid.ends, grid.node_alive,
                           grid.link_alive)
    energized = _energized(labels, grid.is_generator & grid.node_alive)
    if not energized[grid.node_alive].all():
        raise GeneratorlessIslandError(
            "every subgrid needs a generator before capacities can be set"
        )
    _, _, load, _, _ = energized_loads(
        grid.ends, grid.admittance, grid.is_generator, grid.node_alive,
        grid.link_alive, energized, spec,
    )
    n0 = grid.n_nodes_total
    margin = np.r_[np.full(n0, 1.0 + alpha), np.full(grid.n_links_total, 1.0 + beta)]
    capacity = np.maximum(load * margin, floor)
    capacity[~grid.alive] = np.nan
    capacity.setflags(write=False)
    load.setflags(write=False)
    return CapacityTable(capacity, float(alpha), float(beta), spec, load)


@dataclass(frozen=True)
class CascadeResult:
    """Failure trace.

    ``rounds[0]`` is the attacked set; ``rounds[k]`` the components lost in
    the k-th recompute-and-remove pass. ``causes`` maps each unserved
    component to why it went down.
    """

    rounds: tuple
    causes: dict
    n_components: int

    @property
    def unserved(self) -> frozenset:
        return frozenset().union(*self.rounds)

    @property
    def n_unserved(self) -> int:
        return sum(len(r) for r in self.rounds)

    @property
    def n_attacked(self) -> int:
        return len(self.rounds[0])

    @property
    def damage(self) -> float:
        return damage(self)

    def trace(self):
        """One ``(round, cause, component ids)`` record per round and cause."""
        rows = []
        for k, comps in enumerate(self.rounds):
            by_cause = {}
            for c in sorted(comps):
                by_cause.setdefault(self.causes[c], []).append(c)
            for cause in (ATTACKED, OVERLOAD, ISLANDED, DETACHED):
                if cause in by_cause:
                    rows.append((k, cause, tuple(by_cause[cause])))
        return rows


def damage_fraction(n_unserved: int, n_attacked: int, n_components: int) -> float:
    """Failed share of the components that were not attacked directly."""
    if n_attacked >= n_components:
        raise ValidationError("cannot score an attack on every component")
    if not 0 <= n_attacked <= n_unserved <= n_components:
        raise ValidationError(
            f"inconsistent counts: attacked={n_attacked}, unserved={n_unserved}, "
            f"D={n_components}"
        )
    return (n_unserved - n_attacked) / (n_components - n_attacked)


def damage(result: CascadeResult, n_components: int = None) -> float:
    D = result.n_components if n_components is None else n_components
    return damage_fraction(result.n_unserved, result.n_attacked, D)


def _attack_indices(grid, attacked):
    idx = np.unique(np.fromiter((int(c) for c in attacked), dtype=np.intp))
    if len(idx) and (idx[0] < 0 or idx[-1] >= grid.size):
        raise InvalidComponentError("attacked component outside the grid")
    if len(idx) and not grid.alive[idx].all():
        raise InvalidComponentError("attacked component already removed")
    return idx


def simulate_cascade(grid: Grid, capacities: CapacityTable,
                     attacked: Iterable[int], max_rounds: int = None) -> CascadeResult:
    """Run the cascade triggered by removing ``attacked`` all at once.

    Each round re-solves every generator-bearing island, then removes in one
    go every overloaded component and everything stranded in a subgrid with
    no generator. Stops when a round removes nothing, or after
    ``max_rounds`` passes if given.
    """
    attacked = _attack_indices(grid, attacked)
    n0 = grid.n_nodes_total
    ends, adm, is_gen = grid.ends, grid.admittance, grid.is_generator
    cap = capacities.capacity
    spec = capacities.spec

    causes = {int(c): ATTACKED for c in attacked}
    rounds = [tuple(int(c) for c in attacked)]
    node_alive, link_alive = removal_masks(grid, attacked)
    pending = _detached(grid.link_alive, link_alive, n0, causes)

    while max_rounds is None or len(rounds) <= max_rounds:
        labels = island_labels(n0, ends, node_alive, link_alive)
        energized = _energized(labels, is_gen & node_alive)
        _, _, load, node_on, link_on = energized_loads(
            ends, adm, is_gen, node_alive, link_alive, energized, spec
        )
        on = np.r_[node_on, link_on]
        alive = np.r_[node_alive, link_alive]
        over = on & (load > cap + OVERLOAD_TOL)
        stranded = alive & ~on
        gone = over | stranded
        new = list(pending)
        for c in np.flatnonzero(over):
            causes[int(c)] = OVERLOAD
            new.append(int(c))
        for c in np.flatnonzero(stranded):
            causes[int(c)] = ISLANDED
            new.append(int(c))
        before = link_alive
        node_alive = node_alive & ~gone[:n0]
        link_alive = link_alive & ~gone[n0:]
        link_alive &= node_alive[ends[:, 0]] & node_alive[ends[:, 1]]
        pending = []
        new.extend(_detached(before & ~gone[n0:], link_alive, n0, causes))
        if not new:
            break
        rounds.append(tuple(sorted(new)))
    return CascadeResult(tuple(rounds), causes, grid.D)


def _detached(before, after, n0, causes):
    out = []
    for link in np.flatnonzero(before & ~after):
        c = n0 + int(link)
        if c not in causes:
            causes[c] = DETACHED
            out.append(c)
    return out
