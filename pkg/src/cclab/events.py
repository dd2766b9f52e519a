"""Observation and cache-event records shared by every cache policy."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .errors import ConfigInvalid, IoFailure

INSERTED = "inserted"
REFRESHED = "refreshed"
EVICTED_EXPIRED = "evicted_expired"
EVICTED_CAPACITY = "evicted_capacity"
IGNORED_NOT_ADMISSIBLE = "ignored_not_admissible"


@dataclass(frozen=True)
class Observation:
    attribute: str
    value: Any
    timestamp: float


class LookupOutcome(str, Enum):
    HIT = "hit"
    MISS = "miss"
    # found but older than the threshold; evicted and refetched
    EXPIRED_HIT = "expired_hit"
    # found older than the threshold and served anyway (baselines)
    STALE_HIT = "stale_hit"

    @property
    def served_from_cache(self) -> bool:
        return self in (LookupOutcome.HIT, LookupOutcome.STALE_HIT)

    @property
    def expired(self) -> bool:
        return self in (LookupOutcome.EXPIRED_HIT, LookupOutcome.STALE_HIT)


LOOKUP_OUTCOMES = frozenset(o.value for o in LookupOutcome)


@dataclass(frozen=True)
class CacheEvent:
    t: float
    op: str  # "ingest", "lookup" or "fetch"
    attribute: str
    outcome: str

    def to_dict(self) -> dict:
        return {"t": self.t, "op": self.op, "attribute": self.attribute, "outcome": self.outcome}


def write_events(events: Iterable[CacheEvent], path) -> None:
    try:
        with open(path, "w") as fh:
            for ev in events:
                fh.write(json.dumps(ev.to_dict()) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write event log {path}: {exc}") from exc


def read_events(path) -> list[CacheEvent]:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read event log {path}: {exc}") from exc
    try:
        return [CacheEvent(**json.loads(line)) for line in lines if line.strip()]
    except (TypeError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"malformed event log {path}: {exc}") from exc
