"""Experiment driver: damage-versus-budget sweeps and PSO convergence traces.

Every run index draws one admittance realization (seed ``seed + run``) that
all algorithms in that run share, so comparisons between algorithms are
paired. Algorithm randomness gets its own stream per (run, theta, algorithm).
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .attack_model import AttackContext
from .estimators import ALGORITHMS, PSO_VARIANTS, make_attack
from .exceptions import ValidationError
from .ingest import CaseData, assign_admittances, resolve_case
from .power_flow import GenerationSpec
from .pso import PsoParams

log = logging.getLogger(__name__)

DEFAULT_THETAS = tuple(round(0.05 * k, 2) for k in range(1, 13))
CONVERGENCE_THETAS = (0.2, 0.3)

SWEEP_COLUMNS = [
    "algorithm", "theta", "run", "damage", "n_attacked", "n_unserved",
    "attacked_nodes", "attacked_links", "node_fraction", "link_fraction",
    "cost", "budget", "empty_attack",
]
SUMMARY_COLUMNS = [
    "algorithm", "theta", "runs", "damage_mean", "damage_std",
    "node_fraction_mean", "link_fraction_mean",
]
TRACE_COLUMNS = ["algorithm", "theta", "run", "iteration", "best_damage"]
MEAN_TRACE_COLUMNS = ["algorithm", "theta", "iteration", "runs", "best_damage_mean",
                      "best_damage_std"]


@dataclass
class ExperimentConfig:
    case: str = "ieee118"
    algorithms: tuple = ALGORITHMS
    theta_values: tuple = DEFAULT_THETAS
    runs: int = 1
    alpha: float = 0.2
    beta: float = 0.2
    gamma: float = 0.3
    pso: PsoParams = field(default_factory=PsoParams)
    seed: int = 0
    generator_voltage: float = 1.0
    consumer_current: float = 1.0
    admittance_mean: float = 11.0
    admittance_std: float = 2.0
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if int(self.runs) < 1:
            raise ValidationError("runs must be at least 1")
        if not self.algorithms:
            raise ValidationError("no algorithms selected")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValidationError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
        if not self.theta_values:
            raise ValidationError("no theta values")
        for t in self.theta_values:
            if not 0.0 <= float(t) <= 1.0:
                raise ValidationError(f"theta {t} outside [0, 1]")
        for name in ("alpha", "beta"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")
        if not self.gamma > 0:
            raise ValidationError("gamma must be positive")
        if int(self.workers) < 1:
            raise ValidationError("workers must be at least 1")
        return self

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        if "pso" in doc and isinstance(doc["pso"], dict):
            try:
                doc["pso"] = PsoParams(**doc["pso"])
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"bad pso section: {exc}") from None
        for key in ("algorithms", "theta_values"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["algorithms"] = list(self.algorithms)
        doc["theta_values"] = list(self.theta_values)
        return doc

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def run_context(config: ExperimentConfig, case: CaseData, run: int) -> AttackContext:
    grid = assign_admittances(case, config.admittance_mean, config.admittance_std,
                              seed=config.seed + run)
    spec = case.spec or GenerationSpec(config.generator_voltage, config.consumer_current)
    return AttackContext.build(grid, config.alpha, config.beta, config.gamma, spec)


def algorithm_seed(config: ExperimentConfig, run: int, theta_index: int, name: str):
    return np.random.SeedSequence([config.seed, run, theta_index, ALGORITHMS.index(name)])


def _composition(selected, n_nodes):
    nodes = int(selected[:n_nodes].sum())
    links = int(selected[n_nodes:].sum())
    total = nodes + links
    return nodes, links, (nodes / total if total else 0.0), (links / total if total else 0.0)


def _run_one(config: ExperimentConfig, case: CaseData, run: int, keep_traces: bool):
    ctx = run_context(config, case, run)
    n0 = ctx.grid.n_nodes_total
    rows, traces = [], []
    for ti, theta in enumerate(config.theta_values):
        for name in config.algorithms:
            est = make_attack(name, float(theta),
                              random_state=algorithm_seed(config, run, ti, name),
                              pso=config.pso)
            est.fit(ctx)
            sel = est.selected_
            nodes, links, nf, lf = _composition(sel, n0)
            rows.append({
                "algorithm": name, "theta": float(theta), "run": run,
                "damage": 0.0 if not sel.any() else float(est.damage_),
                "n_attacked": est.cascade_.n_attacked,
                "n_unserved": est.cascade_.n_unserved,
                "attacked_nodes": nodes, "attacked_links": links,
                "node_fraction": nf, "link_fraction": lf,
                "cost": float(est.solution_.cost), "budget": float(est.budget_),
                "empty_attack": not sel.any(),
            })
            if keep_traces and name in PSO_VARIANTS:
                for it, value in enumerate(est.history_, start=1):
                    traces.append({"algorithm": name, "theta": float(theta), "run": run,
                                   "iteration": it, "best_damage": float(value)})
    log.info("run %d done", run)
    return rows, traces


def _execute(config, keep_traces):
    config.validate()
    case = resolve_case(config.case)
    jobs = range(int(config.runs))
    if int(config.workers) > 1:
        with ProcessPoolExecutor(max_workers=int(config.workers)) as pool:
            parts = list(pool.map(_run_one, [config] * len(jobs), [case] * len(jobs),
                                  jobs, [keep_traces] * len(jobs)))
    else:
        parts = [_run_one(config, case, run, keep_traces) for run in jobs]
    rows = [r for p in parts for r in p[0]]
    traces = [t for p in parts for t in p[1]]
    order = {name: k for k, name in enumerate(ALGORITHMS)}
    rows.sort(key=lambda r: (order[r["algorithm"]], r["theta"], r["run"]))
    traces.sort(key=lambda r: (order[r["algorithm"]], r["theta"], r["run"], r["iteration"]))
    return rows, traces


def summarize(rows):
    cells = {}
    for r in rows:
        cells.setdefault((r["algorithm"], r["theta"]), []).append(r)
    out = []
    for (name, theta), group in cells.items():
        dmg = np.array([g["damage"] for g in group], dtype=float)
        out.append({
            "algorithm": name, "theta": theta, "runs": len(group),
            "damage_mean": float(np.mean(dmg)), "damage_std": float(np.std(dmg)),
            "node_fraction_mean": float(np.mean([g["node_fraction"] for g in group])),
            "link_fraction_mean": float(np.mean([g["link_fraction"] for g in group])),
        })
    return out


def mean_traces(traces):
    cells = {}
    for t in traces:
        cells.setdefault((t["algorithm"], t["theta"], t["iteration"]), []).append(t["best_damage"])
    return [
        {"algorithm": a, "theta": th, "iteration": it, "runs": len(v),
         "best_damage_mean": float(np.mean(v)), "best_damage_std": float(np.std(v))}
        for (a, th, it), v in cells.items()
    ]


@dataclass
class SweepResult:
    rows: list
    summary: list
    traces: list = field(default_factory=list)


def run_sweep(config: ExperimentConfig, keep_traces: bool = False) -> SweepResult:
    """Damage of every algorithm at every theta, one row per run."""
    rows, traces = _execute(config, keep_traces)
    return SweepResult(rows, summarize(rows), traces)


@dataclass
class ConvergenceResult:
    traces: list
    mean: list


def run_convergence(config: ExperimentConfig) -> ConvergenceResult:
    """Best-so-far damage per PSO iteration, per run and averaged over runs."""
    bad = [a for a in config.algorithms if a not in PSO_VARIANTS]
    if bad:
        raise ValidationError(f"convergence traces need PSO variants, got {bad}")
    _, traces = _execute(config, keep_traces=True)
    return ConvergenceResult(traces, mean_traces(traces))
