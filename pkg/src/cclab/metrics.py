"""Lookup tallies and the reported cache ratios."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyLog
from .events import EVICTED_CAPACITY, EVICTED_EXPIRED, CacheEvent, LookupOutcome

CSV_COLUMNS = (
    "policy",
    "threshold",
    "queries",
    "capacity",
    "hits",
    "misses",
    "lookups",
    "expired",
    "hit_miss_ratio",
    "hit_rate",
    "expired_ratio",
)
METRICS = ("hits", "misses", "lookups", "expired", "hit_miss_ratio", "hit_rate", "expired_ratio")


@dataclass
class Counters:
    hits: float = 0
    misses: float = 0
    expired_events: float = 0
    lookups: float = 0
    evictions: dict[str, float] = field(default_factory=dict)


def round_half_up(value, places: int = 1) -> float:
    """Decimal rounding with halves away from zero; exact for fractions."""
    if isinstance(value, Fraction):
        d = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        d = Decimal(repr(float(value)))
    return float(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def _fmt(x) -> str:
    if isinstance(x, int) or (isinstance(x, float) and x.is_integer()):
        return str(int(x))
    return f"{x:.4f}".rstrip("0").rstrip(".")


@dataclass
class SimulationReport:
    policy: str
    threshold_t: float
    num_queries: int
    capacity: int
    counters: Counters
    repetitions: int = 1

    @property
    def hits(self):
        return self.counters.hits

    @property
    def misses(self):
        return self.counters.misses

    @property
    def lookups(self):
        return self.counters.lookups

    @property
    def expired(self):
        return self.counters.expired_events

    @property
    def avg_hits(self):
        # counters of an aggregated report already hold per-repetition means
        return self.counters.hits

    @property
    def hit_miss_ratio(self) -> float:
        if self.misses == 0:
            return math.inf if self.hits else 0.0
        return self.hits / self.misses

    @property
    def hit_miss_ratio_display(self) -> str:
        if self.misses == 0 and self.hits:
            return "inf"
        if float(self.hits).is_integer() and float(self.misses).is_integer():
            exact = Fraction(int(self.hits), int(self.misses)) if self.misses else Fraction(0)
            return f"{round_half_up(exact, 1):.1f}"
        return f"{round_half_up(self.hit_miss_ratio, 1):.1f}"

    @property
    def hit_rate(self) -> float:
        return self.hits / self.lookups if self.lookups else 0.0

    @property
    def expired_ratio(self) -> float:
        return self.expired / self.lookups if self.lookups else 0.0

    def metric(self, name: str) -> float:
        return getattr(self, name)

    def row(self) -> dict:
        return {
            "policy": self.policy,
            "threshold": _fmt(self.threshold_t),
            "queries": str(self.num_queries),
            "capacity": str(self.capacity),
            "hits": _fmt(self.hits),
            "misses": _fmt(self.misses),
            "lookups": _fmt(self.lookups),
            "expired": _fmt(self.expired),
            "hit_miss_ratio": self.hit_miss_ratio_display,
            "hit_rate": f"{self.hit_rate:.4f}",
            "expired_ratio": f"{self.expired_ratio:.4f}",
        }

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "threshold": self.threshold_t,
            "queries": self.num_queries,
            "capacity": self.capacity,
            "repetitions": self.repetitions,
            "hits": self.hits,
            "misses": self.misses,
            "lookups": self.lookups,
            "expired": self.expired,
            "evictions": dict(sorted(self.counters.evictions.items())),
            "hit_miss_ratio": "inf" if math.isinf(self.hit_miss_ratio) else self.hit_miss_ratio,
            "hit_miss_ratio_display": self.hit_miss_ratio_display,
            "hit_rate": self.hit_rate,
            "expired_ratio": self.expired_ratio,
            "avg_hits": self.avg_hits,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationReport":
        counters = Counters(
            hits=d["hits"],
            misses=d["misses"],
            expired_events=d["expired"],
            lookups=d["lookups"],
            evictions=dict(d.get("evictions", {})),
        )
        return cls(d["policy"], d["threshold"], d["queries"], d["capacity"], counters, d.get("repetitions", 1))


def tally(events: Iterable[CacheEvent], expired_counts_as_hit: bool = False) -> Counters:
    """Count lookup outcomes and evictions in one simulation's event log.

    An entry found past the threshold is a miss by default (fresh context was
    not served) and always an expired event; ``expired_counts_as_hit`` flips
    the hit/miss side for sensitivity checks.
    """
    c = Counters()
    evictions: Counter = Counter()
    for ev in events:
        if ev.outcome in (EVICTED_EXPIRED, EVICTED_CAPACITY):
            evictions[ev.outcome] += 1
        if ev.op != "lookup" or ev.outcome in (EVICTED_EXPIRED, EVICTED_CAPACITY):
            continue
        outcome = LookupOutcome(ev.outcome)
        c.lookups += 1
        if outcome.expired:
            c.expired_events += 1
        if outcome.served_from_cache or (expired_counts_as_hit and outcome is LookupOutcome.EXPIRED_HIT):
            c.hits += 1
        else:
            c.misses += 1
    c.evictions = dict(evictions)
    return c


def compute_report(
    events: Sequence[CacheEvent],
    policy: str,
    threshold: float,
    queries: int,
    capacity: int,
    expired_counts_as_hit: bool = False,
) -> SimulationReport:
    if not events:
        raise EmptyLog("cannot report on an empty event log")
    return SimulationReport(policy, threshold, queries, capacity, tally(events, expired_counts_as_hit))


def report_from_counts(policy, threshold, queries, capacity, hits, misses, expired=0) -> SimulationReport:
    return SimulationReport(
        policy, threshold, queries, capacity, Counters(hits, misses, expired, hits + misses)
    )


GROUP_KEYS = ("policy", "threshold_t", "num_queries", "capacity")


@dataclass
class AggregateRow:
    key: tuple
    count: int
    mean: dict[str, float]
    min: dict[str, float]
    max: dict[str, float]
    report: SimulationReport  # built from mean counters


def aggregate(reports: Sequence[SimulationReport], group_by: Sequence[str] = GROUP_KEYS) -> list[AggregateRow]:
    """Mean/min/max of every metric per group, rows sorted by group key."""
    groups: dict[tuple, list[SimulationReport]] = {}
    for r in reports:
        groups.setdefault(tuple(getattr(r, k) for k in group_by), []).append(r)
    rows = []
    for key in sorted(groups):
        members = groups[key]
        n = len(members)
        mean_counters = Counters(
            hits=sum(r.hits for r in members) / n,
            misses=sum(r.misses for r in members) / n,
            expired_events=sum(r.expired for r in members) / n,
            lookups=sum(r.lookups for r in members) / n,
            evictions={
                k: sum(r.counters.evictions.get(k, 0) for r in members) / n
                for k in sorted({k for r in members for k in r.counters.evictions})
            },
        )
        first = members[0]
        summary = SimulationReport(
            first.policy, first.threshold_t, first.num_queries, first.capacity, mean_counters, n
        )
        values = {m: [r.metric(m) for r in members] for m in METRICS}
        rows.append(
            AggregateRow(
                key=key,
                count=n,
                mean={m: sum(v) / n for m, v in values.items()},
                min={m: min(v) for m, v in values.items()},
                max={m: max(v) for m, v in values.items()},
                report=summary,
            )
        )
    return rows


def reports_to_csv(reports: Iterable[SimulationReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()


def spread_to_csv(rows: Iterable[AggregateRow], group_by: Sequence[str] = GROUP_KEYS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*group_by, "repetitions", "metric", "mean", "min", "max"])
    for row in rows:
        for m in METRICS:
            writer.writerow(
                [*row.key, row.count, m, *(f"{stat[m]:.6g}" for stat in (row.mean, row.min, row.max))]
            )
    return buf.getvalue()


def reports_to_json(reports: Iterable[SimulationReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)
