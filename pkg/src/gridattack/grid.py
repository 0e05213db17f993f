"""Grid topology model.

Components share one index space: nodes occupy ``0..N0-1`` and links
``N0..N0+M0-1``, where ``N0``/``M0`` are the counts of the grid as built.
Removing components never renumbers survivors; a reduced grid keeps the
full index space and masks out what is gone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import (
    DanglingEndpointError,
    DuplicateNodeError,
    InvalidComponentError,
    IsolatedNodeError,
    NonPositiveAdmittanceError,
    ParallelLinkError,
    SelfLoopError,
)

GENERATOR = "generator"
CONSUMER = "consumer"


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Grid:
    """Immutable power-grid topology.

    Attributes
    ----------
    node_ids : tuple of str
    is_generator : ndarray of bool, shape (N0,)
    link_ids : tuple of str
    ends : ndarray of int, shape (M0, 2)
        Endpoint node indices of every link.
    admittance : ndarray of float, shape (M0,)
    node_alive, link_alive : ndarray of bool
        Survivor masks. A link is never alive when one of its endpoints is dead.
    """

    node_ids: tuple
    is_generator: np.ndarray
    link_ids: tuple
    ends: np.ndarray
    admittance: np.ndarray
    node_alive: np.ndarray
    link_alive: np.ndarray

    # -- sizes -----------------------------------------------------------
    @property
    def n_nodes_total(self) -> int:
        return len(self.node_ids)

    @property
    def n_links_total(self) -> int:
        return len(self.link_ids)

    @property
    def size(self) -> int:
        """Length of the component index space (``N0 + M0``)."""
        return self.n_nodes_total + self.n_links_total

    @property
    def N(self) -> int:
        return int(self.node_alive.sum())

    @property
    def M(self) -> int:
        return int(self.link_alive.sum())

    @property
    def D(self) -> int:
        return self.N + self.M

    @property
    def alive(self) -> np.ndarray:
        """Survivor mask over the whole component index space."""
        return np.concatenate([self.node_alive, self.link_alive])

    # -- indexing --------------------------------------------------------
    def is_node(self, component: int) -> bool:
        return 0 <= component < self.n_nodes_total

    def link_component(self, link: int) -> int:
        return self.n_nodes_total + link

    def component_kind(self, component: int) -> str:
        self._check_index(component)
        if component < self.n_nodes_total:
            return GENERATOR if self.is_generator[component] else CONSUMER
        return "link"

    def component_label(self, component: int) -> str:
        self._check_index(component)
        if component < self.n_nodes_total:
            return self.node_ids[component]
        return self.link_ids[component - self.n_nodes_total]

    def surviving(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    def find_node(self, node_id) -> int:
        try:
            return self.node_ids.index(str(node_id))
        except ValueError:
            raise InvalidComponentError(f"no node with id {node_id!r}") from None

    def find_link(self, a, b) -> int:
        """Component index of the link joining nodes ``a`` and ``b`` (by id)."""
        ia, ib = self.find_node(a), self.find_node(b)
        hit = np.flatnonzero(
            ((self.ends[:, 0] == ia) & (self.ends[:, 1] == ib))
            | ((self.ends[:, 0] == ib) & (self.ends[:, 1] == ia))
        )
        if len(hit) == 0:
            raise InvalidComponentError(f"no link between {a!r} and {b!r}")
        return self.link_component(int(hit[0]))

    def incident_links(self, node: int) -> np.ndarray:
        """Indices (into the link arrays) of links touching ``node``, dead or alive."""
        return np.flatnonzero((self.ends[:, 0] == node) | (self.ends[:, 1] == node))

    def _check_index(self, component):
        if not (0 <= int(component) < self.size):
            raise InvalidComponentError(
                f"component {component} outside [0, {self.size})"
            )

    def with_admittance(self, admittance) -> "Grid":
        admittance = np.asarray(admittance, dtype=float)
        if admittance.shape != self.admittance.shape:
            raise ValueError("admittance vector has the wrong length")
        if np.any(~(admittance > 0)):
            raise NonPositiveAdmittanceError("admittances must be positive")
        return Grid(
            self.node_ids,
            self.is_generator,
            self.link_ids,
            self.ends,
            _frozen(admittance),
            self.node_alive,
            self.link_alive,
        )

    def __repr__(self):
        return (
            f"Grid(N={self.N}, M={self.M}, D={self.D}, "
            f"generators={int((self.is_generator & self.node_alive).sum())})"
        )


def build_grid(nodes: Sequence, links: Sequence) -> Grid:
    """Validate a topology and return a :class:`Grid`.

    Parameters
    ----------
    nodes : sequence of ``(node_id, kind)``
        ``kind`` is ``"generator"``/``"consumer"`` or a bool (True = generator).
    links : sequence of ``(a, b, admittance)`` or ``(link_id, a, b, admittance)``
    """
    node_ids = []
    is_gen = []
    index = {}
    for node_id, kind in nodes:
        node_id = str(node_id)
        if node_id in index:
            raise DuplicateNodeError(f"duplicate node id {node_id!r}")
        index[node_id] = len(node_ids)
        node_ids.append(node_id)
        is_gen.append(_parse_kind(kind))

    link_ids, ends, adm = [], [], []
    seen_pairs = set()
    for link in links:
        if len(link) == 4:
            link_id, a, b, y = link
        else:
            a, b, y = link
            link_id = None
        a, b = str(a), str(b)
        for end in (a, b):
            if end not in index:
                raise DanglingEndpointError(f"link endpoint {end!r} is not a node")
        if a == b:
            raise SelfLoopError(f"self-loop at node {a!r}")
        y = float(y)
        if not y > 0:
            raise NonPositiveAdmittanceError(
                f"link {a!r}-{b!r} has non-positive admittance {y}"
            )
        pair = frozenset((a, b))
        if pair in seen_pairs:
            raise ParallelLinkError(f"parallel link between {a!r} and {b!r}")
        seen_pairs.add(pair)
        link_ids.append(str(link_id) if link_id is not None else f"{a}-{b}")
        ends.append((index[a], index[b]))
        adm.append(y)

    n = len(node_ids)
    ends_arr = np.array(ends, dtype=np.intp).reshape(-1, 2)
    degree = np.bincount(ends_arr.ravel(), minlength=n)
    isolated = np.flatnonzero(degree == 0)
    if len(isolated):
        raise IsolatedNodeError(
            f"node {node_ids[isolated[0]]!r} has no incident links"
        )
    return Grid(
        node_ids=tuple(node_ids),
        is_generator=_frozen(np.array(is_gen, dtype=bool)),
        link_ids=tuple(link_ids),
        ends=_frozen(ends_arr),
        admittance=_frozen(np.array(adm, dtype=float)),
        node_alive=_frozen(np.ones(n, dtype=bool)),
        link_alive=_frozen(np.ones(len(link_ids), dtype=bool)),
    )


def _parse_kind(kind) -> bool:
    if isinstance(kind, (bool, np.bool_)):
        return bool(kind)
    k = str(kind).strip().lower()
    if k in ("generator", "gen", "g", "1", "true"):
        return True
    if k in ("consumer", "load", "c", "0", "false"):
        return False
    raise ValueError(f"unknown node kind {kind!r}")


def removal_masks(grid: Grid, removed: Iterable[int]):
    """Survivor masks after removing ``removed`` (node removal drops incident links)."""
    removed = np.fromiter((int(c) for c in removed), dtype=np.intp)
    if len(removed) and (removed.min() < 0 or removed.max() >= grid.size):
        bad = removed[(removed < 0) | (removed >= grid.size)][0]
        raise InvalidComponentError(f"component {bad} outside [0, {grid.size})")
    n0 = grid.n_nodes_total
    node_alive = grid.node_alive.copy()
    link_alive = grid.link_alive.copy()
    node_alive[removed[removed < n0]] = False
    link_alive[removed[removed >= n0] - n0] = False
    link_alive &= node_alive[grid.ends[:, 0]] & node_alive[grid.ends[:, 1]]
    return node_alive, link_alive


def remove_components(grid: Grid, removed: Iterable[int]) -> Grid:
    node_alive, link_alive = removal_masks(grid, removed)
    return Grid(
        grid.node_ids,
        grid.is_generator,
        grid.link_ids,
        grid.ends,
        grid.admittance,
        _frozen(node_alive),
        _frozen(link_alive),
    )


def island_labels(n_nodes, ends, node_alive, link_alive):
    """Connected-component label per node; dead nodes get label -1."""
    live = ends[link_alive]
    # one stored entry per live link; weak connectivity makes it undirected
    order = np.argsort(live[:, 0], kind="stable")
    indptr = np.zeros(n_nodes + 1, dtype=np.int32)
    np.cumsum(np.bincount(live[:, 0], minlength=n_nodes), out=indptr[1:])
    adj = csr_matrix(
        (np.ones(len(live), dtype=np.int8), live[order, 1].astype(np.int32), indptr),
        shape=(n_nodes, n_nodes),
    )
    _, labels = connected_components(adj, directed=True, connection="weak")
    labels = labels.astype(np.intp)
    labels[~node_alive] = -1
    return labels


def connected_subgrids(grid: Grid) -> list:
    """Partition surviving components into connected subgrids.

    Returns a list of frozensets of component indices, ordered by their
    smallest member.
    """
    if grid.N == 0:
        return []
    labels = island_labels(
        grid.n_nodes_total, grid.ends, grid.node_alive, grid.link_alive
    )
    n0 = grid.n_nodes_total
    groups = {}
    for node in np.flatnonzero(grid.node_alive):
        groups.setdefault(labels[node], []).append(int(node))
    for link in np.flatnonzero(grid.link_alive):
        groups[labels[grid.ends[link, 0]]].append(n0 + int(link))
    return sorted((frozenset(g) for g in groups.values()), key=min)
