"""Threshold-driven context cache kept fresh by a sliding observation window.

Only the ``top_k`` attributes of a DSA ranking are admitted. Every incoming
observation goes through a bounded FIFO window; whenever the oldest buffered
observation is older than the threshold it is popped, and if it was the last
buffered reading for its attribute the monitoring unit flags the attribute
stale and its cache entry is dropped. Lookups never serve an entry older
than the threshold.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Any

from .ahp import AttributeRanking
from .errors import ConfigInvalid, TimestampRegression
from .events import (
    EVICTED_CAPACITY,
    EVICTED_EXPIRED,
    IGNORED_NOT_ADMISSIBLE,
    INSERTED,
    REFRESHED,
    CacheEvent,
    LookupOutcome,
    Observation,
)

DEFAULT_WINDOW_SIZE = 64
DEFAULT_TOP_K = 4


def resolve_capacity(capacity, universe: int) -> int:
    """Entry count for ``capacity``.

    Integers are counts. Strings like ``"20%"`` and floats in (0, 1] are
    fractions of ``universe``, rounded up.
    """
    if isinstance(capacity, str):
        text = capacity.strip()
        try:
            if text.endswith("%"):
                fraction = float(text[:-1]) / 100.0
            else:
                return resolve_capacity(float(text) if "." in text else int(text), universe)
        except ValueError as exc:
            raise ConfigInvalid(f"cannot parse capacity {capacity!r}") from exc
    elif isinstance(capacity, bool):
        raise ConfigInvalid(f"invalid capacity {capacity!r}")
    elif isinstance(capacity, int):
        if capacity < 1:
            raise ConfigInvalid(f"capacity must be >= 1, got {capacity}")
        return capacity
    elif isinstance(capacity, float) and capacity > 1:
        if not capacity.is_integer():
            raise ConfigInvalid(f"capacity count must be whole, got {capacity}")
        return int(capacity)
    else:
        fraction = float(capacity)
    if not 0 < fraction <= 1:
        raise ConfigInvalid(f"capacity fraction must lie in (0, 1], got {fraction}")
    if universe < 1:
        raise ConfigInvalid("capacity fraction needs a non-empty attribute universe")
    # guard against 0.2 * 15 = 3.0000000000000004
    return max(1, math.ceil(round(fraction * universe, 9)))


@dataclass
class FreshnessConfig:
    threshold_t: float
    capacity: Any = "100%"
    window_size: int = DEFAULT_WINDOW_SIZE
    top_k: int = DEFAULT_TOP_K

    def validate(self, n_ranked: int) -> None:
        if not self.threshold_t > 0:
            raise ConfigInvalid(f"threshold_t must be > 0, got {self.threshold_t}")
        if self.window_size < 1:
            raise ConfigInvalid(f"window_size must be >= 1, got {self.window_size}")
        if not 1 <= self.top_k <= n_ranked:
            raise ConfigInvalid(f"top_k must lie in 1..{n_ranked}, got {self.top_k}")


@dataclass
class CacheEntry:
    attribute: str
    value: Any
    inserted_at: float
    last_refreshed: float
    weight: float
    seq: int = 0

    def age(self, now: float) -> float:
        return now - self.last_refreshed


@dataclass
class CmuState:
    """Per-attribute recency as seen by the monitoring unit."""

    last_refreshed: dict[str, float] = field(default_factory=dict)
    stale_flags: dict[str, bool] = field(default_factory=dict)


class SlidingWindow:
    """Bounded FIFO of observations with per-attribute counts."""

    def __init__(self, size: int):
        self.size = size
        self.buffer: deque[Observation] = deque()
        self.counts: Counter = Counter()

    def __len__(self):
        return len(self.buffer)

    def push(self, obs: Observation) -> Observation | None:
        """Append ``obs``; returns the observation dropped for room, if any."""
        dropped = None
        if len(self.buffer) == self.size:
            dropped = self._pop()
        self.buffer.append(obs)
        self.counts[obs.attribute] += 1
        return dropped

    def pop_older_than(self, now: float, threshold: float):
        """Yield fronts older than ``threshold`` with whether any newer reading
        of the same attribute is still buffered."""
        while self.buffer and now - self.buffer[0].timestamp > threshold:
            old = self._pop()
            yield old, self.counts[old.attribute] > 0

    def _pop(self) -> Observation:
        old = self.buffer.popleft()
        self.counts[old.attribute] -= 1
        if not self.counts[old.attribute]:
            del self.counts[old.attribute]
        return old


class FreshnessCache:
    def __init__(self, config: FreshnessConfig, ranking: AttributeRanking, universe: int | None = None):
        config.validate(len(ranking.attributes))
        self.config = config
        self.ranking = ranking
        self.threshold = float(config.threshold_t)
        self.capacity = resolve_capacity(
            config.capacity, universe if universe is not None else len(ranking.attributes)
        )
        self.admission = frozenset(ranking.top(config.top_k))
        self.window = SlidingWindow(config.window_size)
        self.cmu = CmuState()
        self.entries: dict[str, CacheEntry] = {}
        self.events: list[CacheEvent] = []
        self._seq = 0
        self._now = -math.inf
        self._last_obs = -math.inf

    def __len__(self):
        return len(self.entries)

    def __contains__(self, attribute):
        return attribute in self.entries

    def _emit(self, t, op, attribute, outcome, out=None):
        ev = CacheEvent(t, op, attribute, outcome)
        self.events.append(ev)
        if out is not None:
            out.append(ev)

    def _advance(self, now):
        if now < self._now:
            raise TimestampRegression(f"time moved backwards: {now} < {self._now}")
        self._now = now

    def _insert(self, attribute, value, stamp, now, op, out=None):
        if attribute not in self.admission:
            self._emit(now, op, attribute, IGNORED_NOT_ADMISSIBLE, out)
            return
        if len(self.entries) >= self.capacity:
            victim = min(
                self.entries.values(), key=lambda e: (e.weight, e.last_refreshed, e.seq)
            )
            del self.entries[victim.attribute]
            self._emit(now, op, victim.attribute, EVICTED_CAPACITY, out)
        self._seq += 1
        self.entries[attribute] = CacheEntry(
            attribute, value, stamp, stamp, self.ranking.weights.get(attribute, 0.0), self._seq
        )
        self._emit(now, op, attribute, INSERTED, out)

    def ingest(self, observation: Observation, now: float) -> list[CacheEvent]:
        if observation.timestamp < self._last_obs:
            raise TimestampRegression(
                f"observation at {observation.timestamp} after one at {self._last_obs}"
            )
        if now < observation.timestamp:
            raise TimestampRegression(f"observation at {observation.timestamp} ingested at {now}")
        self._advance(now)
        self._last_obs = observation.timestamp
        out: list[CacheEvent] = []
        attr = observation.attribute

        # overflow drops the front without a staleness verdict
        self.window.push(observation)
        self.cmu.last_refreshed[attr] = observation.timestamp
        self.cmu.stale_flags[attr] = False

        for old, newer_buffered in self.window.pop_older_than(now, self.threshold):
            if newer_buffered:
                continue
            self.cmu.stale_flags[old.attribute] = True
            entry = self.entries.get(old.attribute)
            if entry is not None and entry.age(now) > self.threshold:
                del self.entries[old.attribute]
                self._emit(now, "ingest", old.attribute, EVICTED_EXPIRED, out)

        entry = self.entries.get(attr)
        if entry is not None:
            entry.value = observation.value
            entry.last_refreshed = max(entry.last_refreshed, observation.timestamp)
            self._emit(now, "ingest", attr, REFRESHED, out)
        else:
            self._insert(attr, observation.value, observation.timestamp, now, "ingest", out)
        return out

    def lookup(self, attribute: str, now: float, value: Any = None) -> LookupOutcome:
        """Classify a request; misses and expired entries are refetched.

        ``value`` stands in for what the context provider returns on a fetch.
        """
        self._advance(now)
        entry = self.entries.get(attribute)
        if entry is not None and entry.age(now) <= self.threshold:
            self._emit(now, "lookup", attribute, LookupOutcome.HIT.value)
            return LookupOutcome.HIT
        if entry is not None:
            outcome = LookupOutcome.EXPIRED_HIT
            self._emit(now, "lookup", attribute, outcome.value)
            del self.entries[attribute]
            self._emit(now, "lookup", attribute, EVICTED_EXPIRED)
        else:
            outcome = LookupOutcome.MISS
            self._emit(now, "lookup", attribute, outcome.value)
        self._insert(attribute, value, now, now, "fetch")
        if attribute in self.entries:
            # a fetched value is monitored like any other cached data point
            self.window.push(Observation(attribute, value, now))
            self.cmu.last_refreshed[attribute] = now
            self.cmu.stale_flags[attribute] = False
        return outcome

    def context_is_fresh(self, now: float) -> bool:
        if not self.entries:
            return False
        return all(
            a in self.entries and self.entries[a].age(now) <= self.threshold for a in self.admission
        )


def new_cache(config: FreshnessConfig, ranking: AttributeRanking, universe: int | None = None) -> FreshnessCache:
    return FreshnessCache(config, ranking, universe)
