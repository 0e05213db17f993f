"""Cascading failures in power grids under cost-restrained hybrid attacks."""

from .attack_model import (
    GLOBAL,
    LOCAL,
    AttackContext,
    AttackSolution,
    attack_centrality,
    attack_costs,
    total_budget,
)
from .cascade import CascadeResult, damage, initial_capacities, simulate_cascade
from .estimators import (
    ALGORITHMS,
    AttackCentrality,
    CascadeSimulator,
    GreedyAttack,
    PSOAttack,
    RandomAttack,
    make_attack,
)
from .exceptions import ValidationError
from .grid import Grid, build_grid, connected_subgrids, remove_components
from .harness import ExperimentConfig, run_convergence, run_sweep
from .ingest import assign_admittances, load_builtin, parse_case, read_case
from .power_flow import GenerationSpec, PowerState, network_state
from .pso import PsoParams, optimize

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "GLOBAL", "LOCAL", "AttackCentrality", "AttackContext",
    "AttackSolution", "CascadeResult", "CascadeSimulator", "ExperimentConfig",
    "GenerationSpec", "GreedyAttack", "Grid", "PSOAttack", "PowerState",
    "PsoParams", "RandomAttack", "ValidationError", "assign_admittances",
    "attack_centrality", "attack_costs", "build_grid", "connected_subgrids",
    "damage", "initial_capacities", "load_builtin", "make_attack",
    "network_state", "optimize", "parse_case", "read_case", "remove_components",
    "run_convergence", "run_sweep", "simulate_cascade", "total_budget",
]
