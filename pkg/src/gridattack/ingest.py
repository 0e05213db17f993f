"""Case files, synthetic admittances, and bundled test topologies.

Two formats are read:

* native JSON::

    {"nodes": [{"id": "1", "kind": "generator"}, ...],
     "links": [{"a": "1", "b": "2", "admittance": 10.0}, ...],
     "spec": {"generator_voltage": 1.0, "consumer_current": 1.0}}

  ``admittance`` and ``spec`` are optional.

* bus/branch tables: one record per line, fields split on whitespace or
  commas, ``#`` starts a comment::

    BUS <id> <gen-flag>
    BRANCH <from> <to> [admittance]
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .exceptions import (
    CaseParseError,
    DuplicateBranchError,
    NoGeneratorError,
    UnknownCaseError,
    ValidationError,
)
from .grid import CONSUMER, GENERATOR, Grid, build_grid
from .power_flow import GenerationSpec

NATIVE = "native"
TABLE = "table"

ADMITTANCE_MEAN = 11.0
ADMITTANCE_STD = 2.0
ADMITTANCE_FLOOR = 0.1


@dataclass
class CaseData:
    """Parsed topology; admittances may still be missing (``None``)."""

    node_ids: list
    is_generator: list
    links: list  # (a, b, admittance or None)
    spec: Optional[GenerationSpec] = None
    name: str = ""
    source_lines: dict = field(default_factory=dict, repr=False)

    @property
    def n_nodes(self):
        return len(self.node_ids)

    @property
    def n_links(self):
        return len(self.links)

    @property
    def complete(self) -> bool:
        return all(y is not None for _, _, y in self.links)

    def to_grid(self) -> Grid:
        if not self.complete:
            raise ValidationError("case has links without admittance; assign them first")
        return build_grid(
            [(n, g) for n, g in zip(self.node_ids, self.is_generator)], self.links
        )


def _check_case(case: CaseData) -> CaseData:
    if not any(case.is_generator):
        raise NoGeneratorError("case contains no generator bus")
    return case


def parse_case(data, format: str = NATIVE, name: str = "") -> CaseData:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if format == NATIVE:
        return _check_case(_parse_native(data, name))
    if format == TABLE:
        return _check_case(_parse_table(data, name))
    raise ValidationError(f"unknown case format {format!r}")


def _parse_native(text, name):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CaseParseError(f"{exc.msg} (column {exc.colno})", exc.lineno) from None
    if not isinstance(doc, dict) or "nodes" not in doc or "links" not in doc:
        raise CaseParseError("document needs 'nodes' and 'links'")
    ids, gens, seen = [], [], set()
    for k, node in enumerate(doc["nodes"]):
        try:
            nid, kind = str(node["id"]), str(node["kind"]).lower()
        except (KeyError, TypeError):
            raise CaseParseError(f"nodes[{k}] needs 'id' and 'kind'") from None
        if kind not in (GENERATOR, CONSUMER):
            raise CaseParseError(f"nodes[{k}] has unknown kind {kind!r}")
        if nid in seen:
            raise CaseParseError(f"duplicate node id {nid!r}")
        seen.add(nid)
        ids.append(nid)
        gens.append(kind == GENERATOR)
    links, pairs = [], set()
    for k, link in enumerate(doc["links"]):
        try:
            a, b = str(link["a"]), str(link["b"])
        except (KeyError, TypeError):
            raise CaseParseError(f"links[{k}] needs 'a' and 'b'") from None
        _check_branch(a, b, seen, pairs, None, f"links[{k}]")
        y = link.get("admittance")
        links.append((a, b, None if y is None else float(y)))
    spec = None
    if doc.get("spec") is not None:
        spec = GenerationSpec(**doc["spec"])
    return CaseData(ids, gens, links, spec, name)


def _check_branch(a, b, nodes, pairs, line, where):
    for end in (a, b):
        if end not in nodes:
            raise CaseParseError(f"{where}: unknown bus {end!r}", line)
    if a == b:
        raise CaseParseError(f"{where}: branch connects bus {a!r} to itself", line)
    pair = frozenset((a, b))
    if pair in pairs:
        raise DuplicateBranchError(f"{where}: duplicate branch {a}-{b}", line)
    pairs.add(pair)


_SPLIT = re.compile(r"[\s,]+")


def _parse_table(text, name):
    ids, gens, links = [], [], []
    seen, pairs, lines = set(), set(), {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        fields = [f for f in _SPLIT.split(body) if f]
        tag = fields[0].upper()
        if tag == "BUS":
            if len(fields) != 3:
                raise CaseParseError("BUS needs <id> <gen-flag>", lineno)
            nid, flag = fields[1], fields[2]
            if flag not in ("0", "1"):
                raise CaseParseError(f"gen-flag must be 0 or 1, got {flag!r}", lineno)
            if nid in seen:
                raise CaseParseError(f"duplicate bus {nid!r}", lineno)
            seen.add(nid)
            ids.append(nid)
            gens.append(flag == "1")
            lines[nid] = lineno
        elif tag == "BRANCH":
            if len(fields) not in (3, 4):
                raise CaseParseError("BRANCH needs <from> <to> [admittance]", lineno)
            a, b = fields[1], fields[2]
            _check_branch(a, b, seen, pairs, lineno, "BRANCH")
            y = None
            if len(fields) == 4:
                try:
                    y = float(fields[3])
                except ValueError:
                    raise CaseParseError(f"bad admittance {fields[3]!r}", lineno) from None
            links.append((a, b, y))
        else:
            raise CaseParseError(f"unknown record {fields[0]!r}", lineno)
    return CaseData(ids, gens, links, None, name, lines)


def assign_admittances(case: CaseData, mean: float = ADMITTANCE_MEAN,
                       std: float = ADMITTANCE_STD, seed=None,
                       floor: float = ADMITTANCE_FLOOR) -> Grid:
    """Fill missing admittances with normal draws, redrawing any below ``floor``."""
    if std < 0:
        raise ValidationError("std must be non-negative")
    if not mean > floor:
        raise ValidationError("mean admittance must exceed the truncation floor")
    rng = np.random.default_rng(seed)
    missing = [k for k, (_, _, y) in enumerate(case.links) if y is None]
    draws = rng.normal(mean, std, len(missing))
    low = draws < floor
    while low.any():
        draws[low] = rng.normal(mean, std, int(low.sum()))
        low = draws < floor
    links = list(case.links)
    for k, y in zip(missing, draws):
        a, b, _ = links[k]
        links[k] = (a, b, float(y))
    return CaseData(case.node_ids, case.is_generator, links, case.spec, case.name).to_grid()


def builtin_names():
    root = resources.files("gridattack") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".case"))


def load_builtin(name: str) -> CaseData:
    path = resources.files("gridattack") / "data" / f"{name}.case"
    if not path.is_file():
        raise UnknownCaseError(
            f"unknown case {name!r}; available: {', '.join(builtin_names())}"
        )
    return parse_case(path.read_text(), TABLE, name)


def read_case(path) -> CaseData:
    path = Path(path)
    fmt = NATIVE if path.suffix.lower() == ".json" else TABLE
    return parse_case(path.read_bytes(), fmt, path.stem)


def resolve_case(case: str) -> CaseData:
    """A bundled case name or a path to a case file."""
    if case in builtin_names():
        return load_builtin(case)
    path = Path(case)
    if path.exists() or path.suffix or len(path.parts) > 1:
        return read_case(path)
    raise UnknownCaseError(
        f"{case!r} is neither a bundled case ({', '.join(builtin_names())}) nor a file"
    )


def dump_native(grid: Grid, spec: Optional[GenerationSpec] = None) -> str:
    doc = {
        "nodes": [
            {"id": nid, "kind": GENERATOR if g else CONSUMER}
            for nid, g in zip(grid.node_ids, grid.is_generator)
        ],
        "links": [
            {"a": grid.node_ids[a], "b": grid.node_ids[b], "admittance": float(y)}
            for (a, b), y in zip(grid.ends, grid.admittance)
        ],
    }
    if spec is not None:
        doc["spec"] = {"generator_voltage": spec.generator_voltage,
                       "consumer_current": spec.consumer_current}
    return json.dumps(doc, indent=1)


def case_from_grid(grid: Grid) -> CaseData:
    links = [(grid.node_ids[a], grid.node_ids[b], float(y))
             for (a, b), y in zip(grid.ends, grid.admittance)]
    return CaseData(list(grid.node_ids), [bool(g) for g in grid.is_generator], links)


def random_case(n_nodes: int, n_links: int, n_generators: int = 1, seed=None) -> CaseData:
    """Connected random topology: a random spanning tree plus extra distinct links."""
    if n_nodes < 2:
        raise ValidationError("need at least two nodes")
    max_links = n_nodes * (n_nodes - 1) // 2
    if not n_nodes - 1 <= n_links <= max_links:
        raise ValidationError(f"n_links must lie in [{n_nodes - 1}, {max_links}]")
    if not 1 <= n_generators <= n_nodes:
        raise ValidationError("n_generators must lie in [1, n_nodes]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_nodes)
    pairs = set()
    for k in range(1, n_nodes):
        a, b = int(perm[k]), int(perm[rng.integers(k)])
        pairs.add((min(a, b), max(a, b)))
    while len(pairs) < n_links:
        a, b = (int(v) for v in rng.choice(n_nodes, 2, replace=False))
        pairs.add((min(a, b), max(a, b)))
    gens = set(int(v) for v in rng.choice(n_nodes, n_generators, replace=False))
    ids = [str(k) for k in range(n_nodes)]
    links = [(str(a), str(b), None) for a, b in sorted(pairs)]
    return CaseData(ids, [k in gens for k in range(n_nodes)], links, name="random")
