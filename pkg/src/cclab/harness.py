"""Config-driven sweeps over policy x threshold x volume x capacity.

A sweep ranks the judgment file once, then for every (volume, repetition)
pair generates one trace (seed = base seed + repetition) and replays it
against every (policy, threshold, capacity) cell. Sharing the trace across
cells keeps policy and threshold comparisons paired.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .ahp import AttributeRanking, load_judgments, run_dsa
from .errors import CellFailure, ConfigInvalid, IoFailure
from .events import write_events
from .freshness_cache import DEFAULT_TOP_K, DEFAULT_WINDOW_SIZE, resolve_capacity
from .metrics import AggregateRow, SimulationReport, aggregate, reports_to_csv, spread_to_csv
from .policies import PolicyKind
from .simulation import simulate
from .workload import DEFAULT_SEED, WorkloadConfig, data_path, generate_trace, scenario, with_overrides

log = logging.getLogger(__name__)

OUT_ENV = "CCLAB_OUT"
SHIPPED_SPECS = ("table1.json", "table2.json", "fig6.json", "fig7.json")


@dataclass
class ExperimentSpec:
    name: str
    policies: list[str]
    thresholds: list[float]
    queries: list[int]
    capacities: list[Any]
    workload: WorkloadConfig
    judgments: Path
    repetitions: int = 10
    seed: int = DEFAULT_SEED
    output_dir: Path | None = None
    window_size: int = DEFAULT_WINDOW_SIZE
    top_k: int = DEFAULT_TOP_K
    recency: str = "lru"
    expired_counts_as_hit: bool = False
    workers: int = 1
    write_events: bool = False
    notes: str = ""

    def validate(self):
        for label in ("policies", "thresholds", "queries", "capacities"):
            if not getattr(self, label):
                raise ConfigInvalid(f"experiment {self.name!r}: {label} list is empty")
        if self.repetitions < 1:
            raise ConfigInvalid(f"repetitions must be >= 1, got {self.repetitions}")
        if self.workers < 1:
            raise ConfigInvalid(f"workers must be >= 1, got {self.workers}")
        for p in self.policies:
            PolicyKind.parse(p)
        for t in self.thresholds:
            if not float(t) > 0:
                raise ConfigInvalid(f"threshold must be > 0, got {t}")
        for q in self.queries:
            if int(q) < 1:
                raise ConfigInvalid(f"query volume must be >= 1, got {q}")
        universe = len(self.workload.profiles)
        for c in self.capacities:
            resolve_capacity(c, universe)
        self.workload.validate()

    @property
    def cell_count(self) -> int:
        return (
            len(self.policies) * len(self.thresholds) * len(self.queries)
            * len(self.capacities) * self.repetitions
        )


def _workload_from(doc) -> WorkloadConfig:
    if doc is None:
        return scenario("road_work")
    if "profiles" in doc:
        return WorkloadConfig.from_dict(doc)
    doc = dict(doc)
    base = scenario(doc.pop("scenario", "road_work"))
    return with_overrides(base, **doc)


def resolve_data_file(name, base_dir: Path | None = None) -> Path:
    """Find ``name`` as given, next to ``base_dir``, or among the shipped files."""
    candidates = [Path(name)]
    if base_dir is not None:
        candidates.append(base_dir / name)
    candidates.append(data_path(Path(name).name))
    for path in candidates:
        if path.is_file():
            return path
    raise IoFailure(f"cannot find {name}")


def load_spec(path) -> ExperimentSpec:
    path = resolve_data_file(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise IoFailure(f"cannot read spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"spec {path} is not valid JSON: {exc}") from exc
    return spec_from_dict(doc, path.parent)


def spec_from_dict(doc: dict, base_dir: Path | None = None) -> ExperimentSpec:
    try:
        spec = ExperimentSpec(
            name=str(doc["name"]),
            policies=list(doc["policies"]),
            thresholds=[float(t) for t in doc["thresholds"]],
            queries=[int(q) for q in doc["queries"]],
            capacities=list(doc["capacities"]),
            workload=_workload_from(doc.get("workload")),
            judgments=resolve_data_file(doc.get("judgments", "roadwork.json"), base_dir),
            repetitions=int(doc.get("repetitions", 10)),
            seed=int(doc.get("seed", DEFAULT_SEED)),
            output_dir=Path(doc["output_dir"]) if doc.get("output_dir") else None,
            window_size=int(doc.get("window_size", DEFAULT_WINDOW_SIZE)),
            top_k=int(doc.get("top_k", DEFAULT_TOP_K)),
            recency=str(doc.get("recency", "lru")),
            expired_counts_as_hit=bool(doc.get("expired_counts_as_hit", False)),
            workers=int(doc.get("workers", 1)),
            write_events=bool(doc.get("write_events", False)),
            notes=str(doc.get("notes", "")),
        )
    except KeyError as exc:
        raise ConfigInvalid(f"experiment spec is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"malformed experiment spec: {exc}") from exc
    spec.validate()
    return spec


def resolve_output_dir(flag=None, spec_dir=None, default=None) -> Path | None:
    """``--out`` beats ``$CCLAB_OUT`` beats the spec's own setting."""
    for candidate in (flag, os.environ.get(OUT_ENV) or None, spec_dir, default):
        if candidate:
            return Path(candidate)
    return None


def _label(x) -> str:
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return str(x).replace("%", "pct").replace(".", "p")


@dataclass(frozen=True, order=True)
class Cell:
    policy: str
    threshold: float
    queries: int
    capacity: str
    rep: int

    @property
    def file_stem(self) -> str:
        parts = (self.policy, _label(self.threshold), self.queries, _label(self.capacity), self.rep)
        return "cell_" + "_".join(str(p) for p in parts)

    def describe(self) -> str:
        return (
            f"policy={self.policy} T={_label(self.threshold)} Q={self.queries} "
            f"capacity={self.capacity} rep={self.rep}"
        )


def _run_group(spec: ExperimentSpec, ranking: AttributeRanking, queries: int, rep: int):
    """All cells sharing the trace for (queries, rep)."""
    config = with_overrides(
        spec.workload,
        num_queries=queries,
        seed=spec.seed + rep,
        focus=ranking.top(spec.workload.attributes_per_query),
    )
    trace = generate_trace(config)
    universe = len(config.profiles)
    out = []
    for policy, threshold, capacity in itertools.product(spec.policies, spec.thresholds, spec.capacities):
        cell = Cell(PolicyKind.parse(policy).value, float(threshold), queries, str(capacity), rep)
        try:
            report, events = simulate(
                trace, policy, threshold, capacity, ranking, universe,
                spec.window_size, spec.top_k, spec.recency, spec.expired_counts_as_hit,
            )
        except Exception as exc:
            raise CellFailure(cell.describe(), exc) from exc
        out.append((cell, report, events if spec.write_events else None))
    return out


def _run_group_star(args):
    return _run_group(*args)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    ranking: AttributeRanking
    cells: list[tuple[Cell, SimulationReport]]
    rows: list[AggregateRow]
    output_dir: Path | None
    paths: list[Path] = field(default_factory=list)

    @property
    def reports(self) -> list[SimulationReport]:
        return [r for _, r in self.cells]


def run_experiment(spec: ExperimentSpec, output_dir=None, workers: int | None = None) -> ExperimentResult:
    spec.validate()
    attributes, judgments, cr_threshold = load_judgments(spec.judgments)
    ranking = run_dsa(attributes, judgments, cr_threshold)
    workers = workers or spec.workers
    out_dir = resolve_output_dir(output_dir, spec.output_dir)

    groups = [(spec, ranking, q, rep) for q in spec.queries for rep in range(spec.repetitions)]
    done: list = []
    try:
        if workers > 1 and len(groups) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for chunk in pool.map(_run_group_star, groups):
                    done.extend(chunk)
        else:
            for g in groups:
                done.extend(_run_group(*g))
    except CellFailure:
        if out_dir is not None:
            _write_partial(spec, done, out_dir)
        raise

    done.sort(key=lambda item: item[0])
    cells = [(cell, report) for cell, report, _ in done]
    rows = aggregate([r for _, r in cells])
    result = ExperimentResult(spec, ranking, cells, rows, out_dir)
    if out_dir is not None:
        result.paths = write_outputs(result, {cell: ev for cell, _, ev in done if ev is not None})
    return result


def _write(path: Path, text: str) -> Path:
    try:
        path.write_text(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def _mkdir(out_dir: Path):
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create output directory {out_dir}: {exc}") from exc


def write_outputs(result: ExperimentResult, events: dict | None = None) -> list[Path]:
    spec, out_dir = result.spec, result.output_dir
    _mkdir(out_dir)
    stale = out_dir / f"sweep_{spec.name}.INCOMPLETE"
    if stale.exists():
        stale.unlink()
    paths = []
    for cell, report in result.cells:
        doc = {"cell": cell.__dict__, "report": report.to_dict()}
        paths.append(_write(out_dir / f"{cell.file_stem}.json", json.dumps(doc, indent=2) + "\n"))
        if events and cell in events:
            path = out_dir / f"{cell.file_stem}.jsonl"
            write_events(events[cell], path)
            paths.append(path)
    summaries = [row.report for row in result.rows]
    paths.append(_write(out_dir / f"sweep_{spec.name}.csv", reports_to_csv(summaries)))
    paths.append(_write(out_dir / f"sweep_{spec.name}_spread.csv", spread_to_csv(result.rows)))
    mirror = {
        "name": spec.name,
        "complete": True,
        "cells": len(result.cells),
        "repetitions": spec.repetitions,
        "seed": spec.seed,
        "ranking": result.ranking.to_dict(),
        "rows": [r.to_dict() for r in summaries],
    }
    paths.append(_write(out_dir / f"sweep_{spec.name}.json", json.dumps(mirror, indent=2) + "\n"))
    return paths


def _write_partial(spec: ExperimentSpec, done: list, out_dir: Path):
    _mkdir(out_dir)
    done = sorted(done, key=lambda item: item[0])
    rows = aggregate([r for _, r, _ in done]) if done else []
    _write(out_dir / f"sweep_{spec.name}.INCOMPLETE", f"{len(done)} of {spec.cell_count} cells completed\n")
    _write(out_dir / f"sweep_{spec.name}.partial.csv", reports_to_csv(row.report for row in rows))
    log.warning("sweep %s incomplete: %d of %d cells", spec.name, len(done), spec.cell_count)
