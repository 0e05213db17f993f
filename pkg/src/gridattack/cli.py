"""Command line: ``gridattack sweep|converge|centrality|cascade``.

Exit status is 0 on success, 1 for invalid input, 2 for I/O failures.
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np

from .attack_model import GLOBAL, LOCAL
from .cascade import damage
from .estimators import ALGORITHMS, PSO_VARIANTS, make_attack
from .exceptions import ValidationError
from .harness import (
    CONVERGENCE_THETAS,
    MEAN_TRACE_COLUMNS,
    SUMMARY_COLUMNS,
    SWEEP_COLUMNS,
    TRACE_COLUMNS,
    ExperimentConfig,
    run_context,
    run_convergence,
    run_sweep,
)
from .ingest import resolve_case
from .pso import PsoParams
from .tables import write_table

EXIT_VALIDATION = 1
EXIT_IO = 2


def parse_thetas(text):
    """``0.1,0.2`` or an inclusive range ``start:stop:step``."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + k * step, 10) for k in range(n))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ValidationError(f"cannot parse theta list {text!r}") from None


def parse_algos(text):
    names = tuple(a.strip().upper() for a in text.split(",") if a.strip())
    for a in names:
        if a not in ALGORITHMS:
            raise ValidationError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
    return names


def model_options(f):
    for opt in reversed([
        click.option("--case", help="Bundled case name or path to a case file."),
        click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     help="JSON experiment config; flags override it."),
        click.option("--alpha", type=float, help="Node safety margin."),
        click.option("--beta", type=float, help="Link safety margin."),
        click.option("--gamma", type=float, help="Cost per unit admittance."),
        click.option("--seed", type=int, help="Master seed."),
    ]):
        f = opt(f)
    return f


def experiment_options(f):
    for opt in reversed([
        click.option("--algos", help="Comma-separated algorithm names."),
        click.option("--theta", help="Theta list (0.1,0.2) or range (0.05:0.6:0.05)."),
        click.option("--runs", type=int, help="Independent admittance draws."),
        click.option("--workers", type=int, help="Parallel worker processes."),
        click.option("--particles", type=int, help="PSO swarm size."),
        click.option("--iters", type=int, help="PSO iterations."),
        click.option("--c1", type=float),
        click.option("--c2", type=float),
        click.option("--wmax", type=float),
        click.option("--wmin", type=float),
        click.option("--out", type=click.Path(dir_okay=False), help="Per-run table (default stdout)."),
        click.option("--summary", type=click.Path(dir_okay=False), help="Aggregated table."),
    ]):
        f = opt(f)
    return f


def build_config(config_path=None, case=None, alpha=None, beta=None, gamma=None,
                 seed=None, algos=None, theta=None, runs=None, workers=None,
                 particles=None, iters=None, c1=None, c2=None, wmax=None, wmin=None,
                 **defaults):
    config = ExperimentConfig.from_file(config_path) if config_path else ExperimentConfig()
    for key, value in defaults.items():
        if config_path is None or key not in _explicit_keys(config_path):
            config = config.with_overrides(**{key: value})
    pso = {}
    for key, value in (("n", particles), ("t_max", iters), ("c1", c1), ("c2", c2),
                       ("w_max", wmax), ("w_min", wmin)):
        if value is not None:
            pso[key] = value
    if pso:
        try:
            params = PsoParams(**{**asdict(config.pso), **pso})
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        config = config.with_overrides(pso=params)
    config = config.with_overrides(
        case=case, alpha=alpha, beta=beta, gamma=gamma, seed=seed, runs=runs,
        workers=workers,
        algorithms=parse_algos(algos) if algos else None,
        theta_values=parse_thetas(theta) if theta else None,
    )
    return config.validate()


def _explicit_keys(path):
    try:
        return set(json.loads(Path(path).read_text()))
    except (OSError, ValueError):
        return set()


def emit(rows, columns, path):
    if path:
        write_table(rows, columns, path)
    else:
        write_table(rows, columns, sys.stdout)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose):
    """Cascading failures in power grids under cost-restrained attacks."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@model_options
@experiment_options
def sweep(out, summary, **kw):
    """Damage versus budget for each algorithm."""
    config = build_config(**kw)
    result = run_sweep(config)
    emit(result.rows, SWEEP_COLUMNS, out)
    if summary:
        write_table(result.summary, SUMMARY_COLUMNS, summary)


@cli.command()
@model_options
@experiment_options
def converge(out, summary, **kw):
    """Best damage per PSO iteration."""
    if not kw.get("algos"):
        kw["algorithms"] = PSO_VARIANTS
    if not kw.get("theta"):
        kw["theta_values"] = CONVERGENCE_THETAS
    config = build_config(**kw)
    result = run_convergence(config)
    emit(result.traces, TRACE_COLUMNS, out)
    if summary:
        write_table(result.mean, MEAN_TRACE_COLUMNS, summary)


@cli.command()
@model_options
@click.option("--run", type=int, default=0, show_default=True,
              help="Run index selecting the admittance draw.")
@click.option("--out", type=click.Path(dir_okay=False))
def centrality(out, run, **kw):
    """Local and global attack centrality of every component."""
    config = build_config(**kw)
    ctx = run_context(config, resolve_case(config.case), run)
    grid = ctx.grid
    local, glob = ctx.centrality(LOCAL).psi, ctx.centrality(GLOBAL).psi
    rows = [
        {"component": int(c), "label": grid.component_label(c),
         "kind": grid.component_kind(c), "cost": float(ctx.costs.cost[c]),
         "psi_local": float(local[c]), "psi_global": float(glob[c])}
        for c in grid.surviving()
    ]
    emit(rows, ["component", "label", "kind", "cost", "psi_local", "psi_global"], out)


@cli.command()
@model_options
@click.option("--run", type=int, default=0, show_default=True)
@click.option("--attack", help="Comma-separated component indices to remove.")
@click.option("--algo", help="Pick the attack with this algorithm instead.")
@click.option("--theta", type=float, default=0.2, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def cascade(out, run, attack, algo, theta, **kw):
    """Round-by-round trace of one attack."""
    if bool(attack) == bool(algo):
        raise ValidationError("give exactly one of --attack or --algo")
    config = build_config(**kw)
    ctx = run_context(config, resolve_case(config.case), run)
    grid = ctx.grid
    if attack:
        try:
            ids = [int(v) for v in attack.split(",") if v.strip()]
        except ValueError:
            raise ValidationError(f"cannot parse attack list {attack!r}") from None
    else:
        name = parse_algos(algo)[0]
        est = make_attack(name, theta, random_state=config.seed, pso=config.pso)
        ids = list(est.fit(ctx).solution_.components)
    for c in ids:
        grid._check_index(c)
    result = ctx.cascade(np.isin(np.arange(grid.size), ids))
    rows = [
        {"round": k, "cause": cause, "components": list(comps),
         "labels": [grid.component_label(c) for c in comps]}
        for k, cause, comps in result.trace()
    ]
    emit(rows, ["round", "cause", "components", "labels"], out)
    if result.n_attacked < grid.D:
        click.echo(f"# damage {damage(result)!r}", err=True)


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="gridattack", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_VALIDATION
    except click.ClickException as exc:
        exc.show()
        return EXIT_IO if isinstance(exc, click.FileError) else EXIT_VALIDATION
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_VALIDATION
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
