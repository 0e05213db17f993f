"""Particle swarm search for the most damaging affordable attack.

Particles move in the continuous cube ``[0, 1]^D``. A position is turned
into an attack by ranking components by coordinate and filling the budget
greedily from the top, so every evaluated attack is affordable.

Personal and global bests remember the continuous position that scored
best, not just its binary attack: binary attractors sit on cube corners,
where clipping pins every particle and the swarm stops exploring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .attack_model import AttackContext, AttackSolution, CentralityTable, CostTable, make_solution
from .cascade import damage_fraction
from .greedy import budget_fill

OHA = "OHA"
LC_OHA = "LC-OHA"
GC_OHA = "GC-OHA"
VARIANT_SCOPE = {OHA: None, LC_OHA: "local", GC_OHA: "global"}


@dataclass(frozen=True)
class PsoParams:
    n: int = 10
    t_max: int = 200
    c1: float = 2.0
    c2: float = 2.0
    w_max: float = 0.9
    w_min: float = 0.4
    v_clamp: float = 1.0
    per_dimension_random: bool = True

    def __post_init__(self):
        if self.n < 1 or self.t_max < 1:
            raise ValueError("need at least one particle and one iteration")
        if self.w_max < self.w_min:
            raise ValueError("w_max must be at least w_min")
        if not self.v_clamp > 0:
            raise ValueError("v_clamp must be positive")

    def inertia(self, t: int) -> float:
        """Linearly annealed inertia weight: ``w_max`` at t=0, ``w_min`` at t_max."""
        return self.w_max - t * (self.w_max - self.w_min) / self.t_max


@dataclass
class SwarmState:
    position: np.ndarray
    velocity: np.ndarray
    p_best: np.ndarray = None
    p_best_fitness: np.ndarray = None
    g_best: np.ndarray = None
    g_best_solution: np.ndarray = None
    g_best_fitness: float = -np.inf
    t: int = 0
    seeded_particle: Optional[int] = None

    @property
    def n(self):
        return self.position.shape[0]

    @property
    def dim(self):
        return self.position.shape[1]


def rescale_unit(values) -> np.ndarray:
    """Min-max map of the finite entries onto [0, 1]; NaN maps to 0, a constant vector to 0.5."""
    values = np.asarray(values, dtype=float)
    out = np.zeros(values.shape)
    ok = np.isfinite(values)
    if not ok.any():
        return out
    lo, hi = values[ok].min(), values[ok].max()
    out[ok] = 0.5 if hi - lo <= 0 else (values[ok] - lo) / (hi - lo)
    return out


def init_swarm(params: PsoParams, dim: int, rng,
               seed_centrality: Optional[CentralityTable] = None) -> SwarmState:
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    position = rng.random((params.n, dim))
    seeded = None
    if seed_centrality is not None:
        seeded = int(rng.integers(params.n))
        position[seeded] = rescale_unit(seed_centrality.psi)
    return SwarmState(position, np.zeros((params.n, dim)), seeded_particle=seeded)


def binarize(position, costs: CostTable, budget: float) -> AttackSolution:
    """Largest coordinates first (ties to the lower index), filled under the budget."""
    position = np.asarray(position, dtype=float)
    order = np.argsort(-position, kind="stable")
    order = order[np.isfinite(costs.cost[order])]
    return make_solution(budget_fill(order, costs.cost, budget), costs, budget)


def evaluate_swarm(swarm: SwarmState, evaluate: Callable) -> SwarmState:
    """Score the initial positions and set personal and global bests."""
    n = swarm.n
    swarm.p_best = np.zeros(swarm.position.shape)
    swarm.p_best_fitness = np.full(n, -np.inf)
    for j in range(n):
        _update_bests(swarm, j, *evaluate(swarm.position[j]))
    return swarm


def _update_bests(swarm, j, selected, fitness):
    if fitness > swarm.p_best_fitness[j]:
        swarm.p_best_fitness[j] = fitness
        swarm.p_best[j] = swarm.position[j]
    if fitness > swarm.g_best_fitness:
        swarm.g_best_fitness = fitness
        swarm.g_best = swarm.position[j].copy()
        swarm.g_best_solution = np.array(selected, dtype=bool)


def pso_step(swarm: SwarmState, params: PsoParams, evaluate: Callable, rng) -> SwarmState:
    """Move every particle once, in index order, and re-score it.

    Bests are updated right after each particle is scored, so later particles
    in the same sweep already follow an improved global best.
    """
    w = params.inertia(swarm.t)
    shape = (2, swarm.dim) if params.per_dimension_random else 2
    for j in range(swarm.n):
        r1, r2 = rng.random(shape)
        x = swarm.position[j]
        v = (w * swarm.velocity[j]
             + params.c1 * r1 * (swarm.p_best[j] - x)
             + params.c2 * r2 * (swarm.g_best - x))
        v = np.clip(v, -params.v_clamp, params.v_clamp)
        swarm.velocity[j] = v
        swarm.position[j] = np.clip(x + v, 0.0, 1.0)
        _update_bests(swarm, j, *evaluate(swarm.position[j]))
    swarm.t += 1
    return swarm


def mutate_elite(swarm: SwarmState, rng) -> SwarmState:
    """Overwrite a random particle with the global best and flip one random component.

    The flip acts on the attack: a component the best attack selects is
    pushed to 0.0, an unselected one to 1.0. ``g_best`` itself is untouched.
    """
    j = int(rng.integers(swarm.n))
    k = int(rng.integers(swarm.dim))
    pos = swarm.g_best.copy()
    pos[k] = 0.0 if swarm.g_best_solution[k] else 1.0
    swarm.position[j] = pos
    return swarm


@dataclass
class PsoResult:
    solution: AttackSolution
    fitness: float
    history: np.ndarray
    initial_fitness: float
    n_evaluations: int
    n_cascades: int
    evaluated: list = field(default_factory=list, repr=False)


def attack_objective(context: AttackContext, budget: float, record=None):
    """Position -> (binary attack, damage), memoized on the attack.

    Attacking every component scores 0: nothing is left to fail.
    """
    cache = {}
    size = context.grid.D

    def evaluate(position):
        sol = binarize(position, context.costs, budget)
        if record is not None:
            record.append(sol)
        key = sol.selected.tobytes()
        if key not in cache:
            if len(sol) >= size:
                cache[key] = 0.0
            else:
                result = context.cascade(sol.selected)
                cache[key] = damage_fraction(result.n_unserved, result.n_attacked, size)
        return sol.selected, cache[key]

    evaluate.cache = cache
    return evaluate


def optimize(context: AttackContext, budget: float, variant: str = LC_OHA,
             params: PsoParams = PsoParams(), rng=None,
             centrality: Optional[CentralityTable] = None,
             record_evaluations: bool = False, seeding: bool = True) -> PsoResult:
    """Search for the best attack costing at most ``budget``.

    ``variant`` picks the seeding: ``OHA`` starts from random positions only,
    ``LC-OHA``/``GC-OHA`` plant the local/global centrality vector in one particle.
    ``seeding=False`` skips the planting, which makes the three variants identical.
    """
    if variant not in VARIANT_SCOPE:
        raise ValueError(f"unknown variant {variant!r}")
    rng = np.random.default_rng(rng)
    scope = VARIANT_SCOPE[variant]
    if scope is None or not seeding:
        centrality = None
    elif centrality is None:
        centrality = context.centrality(scope)

    record = [] if record_evaluations else None
    evaluate = attack_objective(context, budget, record)
    n_calls = 0

    def counted(position):
        nonlocal n_calls
        n_calls += 1
        return evaluate(position)

    swarm = init_swarm(params, context.grid.size, rng, centrality)
    evaluate_swarm(swarm, counted)
    initial = swarm.g_best_fitness
    history = np.empty(params.t_max)
    for t in range(params.t_max):
        mutate_elite(swarm, rng)
        pso_step(swarm, params, counted, rng)
        history[t] = swarm.g_best_fitness
    solution = make_solution(swarm.g_best_solution, context.costs, budget)
    return PsoResult(solution, float(swarm.g_best_fitness), history, float(initial),
                     n_calls, len(evaluate.cache), record or [])
