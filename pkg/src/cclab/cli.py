"""Command line entry point: rank, simulate, sweep, replay and report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .ahp import load_judgments, run_dsa
from .errors import CclabError, CellFailure, ConfigInvalid, InconsistentJudgments, IoFailure
from .events import write_events
from .harness import load_spec, resolve_data_file, resolve_output_dir, run_experiment
from .metrics import SimulationReport, aggregate, reports_to_csv
from .simulation import simulate
from .workload import (
    DEFAULT_SEED,
    SCENARIOS,
    QueryEvent,
    generate_trace,
    read_trace,
    scenario,
    with_overrides,
    write_trace,
)

EXIT_CODES = {
    InconsistentJudgments: 3,
    ConfigInvalid: 4,
    IoFailure: 5,
    CellFailure: 6,
}


def _exit_code(exc: CclabError) -> int:
    for kind, code in EXIT_CODES.items():
        if isinstance(exc, kind):
            return code
    return 1


def _add_cell_flags(p, trace_source: bool = False):
    p.add_argument("--policy", default="pfpa", help="pfpa, fifo, lfu or ru")
    p.add_argument("--threshold", type=float, default=20.0, help="freshness threshold T (minutes)")
    p.add_argument("--capacity", default="100%", help="entry count, fraction or percentage")
    p.add_argument("--judgments", default="roadwork.json", help="pairwise judgment file")
    p.add_argument("--window-size", type=int, default=64)
    p.add_argument("--top-k", type=int, default=4)
    p.add_argument("--recency", choices=("lru", "mru"), default="lru")
    p.add_argument("--events", metavar="PATH", help="write the cache event log as JSON Lines")
    p.add_argument("--out", help="output directory (overrides $CCLAB_OUT)")
    if not trace_source:
        p.add_argument("--queries", type=int, default=500)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--scenario", choices=sorted(SCENARIOS), default="road_work")
        p.add_argument("--export-trace", metavar="PATH", help="save the generated trace as JSON Lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cclab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank attributes from a judgment file")
    p.add_argument("--judgments", default="roadwork.json")
    p.add_argument("--seed", type=int, default=0, help="seed for the sensitivity trials")
    p.add_argument("--out", help="output directory (overrides $CCLAB_OUT)")

    p = sub.add_parser("simulate", help="run a single cell")
    _add_cell_flags(p)

    p = sub.add_parser("replay", help="run a single cell on an exported trace")
    p.add_argument("--trace", required=True, help="trace file written by --export-trace")
    _add_cell_flags(p, trace_source=True)

    p = sub.add_parser("sweep", help="run an experiment spec")
    p.add_argument("--spec", required=True, help="spec file, or the name of a shipped spec")
    p.add_argument("--out", help="output directory (overrides $CCLAB_OUT)")
    p.add_argument("--seed", type=int, help="replace the spec's base seed")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--events", action="store_true", help="also write per-cell event logs")

    p = sub.add_parser("report", help="aggregate per-cell report files")
    p.add_argument("paths", nargs="+", help="cell_*.json files or directories holding them")
    p.add_argument("--out", help="output directory (overrides $CCLAB_OUT)")
    return parser


def _ranking(path):
    attributes, judgments, cr_threshold = load_judgments(resolve_data_file(path))
    return run_dsa(attributes, judgments, cr_threshold)


def _write_text(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _run_cell(args, trace, universe, stem, ranking):
    report, events = simulate(
        trace, args.policy, args.threshold, args.capacity, ranking, universe,
        args.window_size, args.top_k, args.recency,
    )
    text = reports_to_csv([report])
    if args.events:
        write_events(events, args.events)
    out_dir = resolve_output_dir(args.out)
    if out_dir is not None:
        _write_text(out_dir / f"{stem}.csv", text)
        _write_text(out_dir / f"{stem}.json", json.dumps(report.to_dict(), indent=2) + "\n")
    sys.stdout.write(text)


def cmd_rank(args):
    ranking = run_dsa(*load_judgments(resolve_data_file(args.judgments)), seed=args.seed)
    text = ranking.to_json() + "\n"
    out_dir = resolve_output_dir(args.out)
    if out_dir is not None:
        _write_text(out_dir / "ranking.json", text)
    sys.stdout.write(text)


def cmd_simulate(args):
    ranking = _ranking(args.judgments)
    base = scenario(args.scenario)
    config = with_overrides(
        base,
        num_queries=args.queries,
        seed=args.seed,
        focus=ranking.top(base.attributes_per_query),
    )
    trace = generate_trace(config)
    if args.export_trace:
        write_trace(trace, args.export_trace)
    stem = f"simulate_{args.policy}_{args.threshold:g}_{args.queries}_{args.capacity}_{args.seed}"
    _run_cell(args, trace, len(config.profiles), stem.replace("%", "pct"), ranking)


def cmd_replay(args):
    trace = read_trace(args.trace)
    # capacity fractions refer to every attribute the trace mentions
    names = set()
    for ev in trace:
        names.update(ev.attributes if isinstance(ev, QueryEvent) else (ev.observation.attribute,))
    universe = len(names)
    stem = f"replay_{Path(args.trace).stem}_{args.policy}_{args.threshold:g}_{args.capacity}"
    _run_cell(args, trace, universe, stem.replace("%", "pct"), _ranking(args.judgments))


def cmd_sweep(args):
    spec = load_spec(args.spec)
    if args.seed is not None:
        spec.seed = args.seed
    if args.events:
        spec.write_events = True
    out_dir = resolve_output_dir(args.out, spec.output_dir, Path("cclab-out") / spec.name)
    result = run_experiment(spec, out_dir, args.workers)
    sys.stdout.write(reports_to_csv(row.report for row in result.rows))


def _cell_files(paths):
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            yield from sorted(path.glob("cell_*.json"))
        elif path.is_file():
            yield path
        else:
            raise IoFailure(f"no such report file or directory: {path}")


def cmd_report(args):
    reports = []
    for path in _cell_files(args.paths):
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise IoFailure(f"cannot read report {path}: {exc}") from exc
        reports.append(SimulationReport.from_dict(doc.get("report", doc)))
    if not reports:
        raise ConfigInvalid("no report files found")
    text = reports_to_csv(row.report for row in aggregate(reports))
    out_dir = resolve_output_dir(args.out)
    if out_dir is not None:
        _write_text(out_dir / "report.csv", text)
    sys.stdout.write(text)


COMMANDS = {
    "rank": cmd_rank,
    "simulate": cmd_simulate,
    "replay": cmd_replay,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except CclabError as exc:
        print(f"cclab: error: {' '.join(str(exc).split())}", file=sys.stderr)
        return _exit_code(exc)
    return 0


def main():
    sys.exit(cli_main())
