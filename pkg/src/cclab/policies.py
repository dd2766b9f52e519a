"""FIFO, LFU and recency baselines sharing the freshness clock.

Baselines are demand-filled: a miss fetches and inserts, an observation only
refreshes an entry that is already cached, and an entry is served however old
it is. The lookup outcome still records whether the served entry was past the
threshold so expired service can be counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

from .errors import ConfigInvalid, TimestampRegression
from .events import EVICTED_CAPACITY, INSERTED, REFRESHED, CacheEvent, LookupOutcome, Observation
from .freshness_cache import resolve_capacity


class PolicyKind(str, Enum):
    FIFO = "fifo"
    LFU = "lfu"
    RU = "ru"
    PFPA = "pfpa"

    @classmethod
    def parse(cls, name) -> "PolicyKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ConfigInvalid(f"unknown policy {name!r}; choose from {[p.value for p in cls]}") from None


@dataclass
class BaselineEntry:
    attribute: str
    value: Any
    inserted_at: float
    last_refreshed: float
    last_accessed: float
    access_count: int = 0
    seq: int = 0

    def age(self, now: float) -> float:
        return now - self.last_refreshed


def _fifo_key(e):
    return (e.inserted_at, e.seq)


def _lfu_key(e):
    return (e.access_count, e.inserted_at, e.seq)


def _lru_key(e):
    return (e.last_accessed, e.inserted_at, e.seq)


def _mru_key(e):
    return (-e.last_accessed, e.inserted_at, e.seq)


class BaselineCache:
    """One of FIFO, LFU or RU.

    ``recency`` picks the RU victim: ``"lru"`` (default) evicts the least
    recently accessed entry, ``"mru"`` the most recently accessed one.
    """

    def __init__(self, policy, capacity, threshold_t: float, universe: int = 0, recency: str = "lru"):
        self.policy = PolicyKind.parse(policy)
        if self.policy is PolicyKind.PFPA:
            raise ConfigInvalid("PFPA is served by FreshnessCache, not BaselineCache")
        if not threshold_t > 0:
            raise ConfigInvalid(f"threshold_t must be > 0, got {threshold_t}")
        if recency not in ("lru", "mru"):
            raise ConfigInvalid(f"recency must be 'lru' or 'mru', got {recency!r}")
        self.capacity = resolve_capacity(capacity, universe)
        self.threshold = float(threshold_t)
        self.recency = recency
        self.entries: dict[str, BaselineEntry] = {}
        self.events: list[CacheEvent] = []
        self._seq = 0
        self._now = -math.inf
        self._last_obs = -math.inf
        if self.policy is PolicyKind.FIFO:
            self._victim_key = _fifo_key
        elif self.policy is PolicyKind.LFU:
            self._victim_key = _lfu_key
        else:
            self._victim_key = _lru_key if recency == "lru" else _mru_key

    def __len__(self):
        return len(self.entries)

    def __contains__(self, attribute):
        return attribute in self.entries

    def _advance(self, now):
        if now < self._now:
            raise TimestampRegression(f"time moved backwards: {now} < {self._now}")
        self._now = now

    def victim(self) -> str:
        return min(self.entries.values(), key=self._victim_key).attribute

    def lookup(self, attribute: str, now: float, value: Any = None) -> LookupOutcome:
        self._advance(now)
        entry = self.entries.get(attribute)
        if entry is not None:
            entry.access_count += 1
            entry.last_accessed = now
            outcome = LookupOutcome.STALE_HIT if entry.age(now) > self.threshold else LookupOutcome.HIT
            self.events.append(CacheEvent(now, "lookup", attribute, outcome.value))
            return outcome

        self.events.append(CacheEvent(now, "lookup", attribute, LookupOutcome.MISS.value))
        if len(self.entries) >= self.capacity:
            gone = self.victim()
            del self.entries[gone]
            self.events.append(CacheEvent(now, "fetch", gone, EVICTED_CAPACITY))
        self._seq += 1
        self.entries[attribute] = BaselineEntry(attribute, value, now, now, now, 0, self._seq)
        self.events.append(CacheEvent(now, "fetch", attribute, INSERTED))
        return LookupOutcome.MISS

    def ingest(self, observation: Observation, now: float) -> list[CacheEvent]:
        if observation.timestamp < self._last_obs:
            raise TimestampRegression(
                f"observation at {observation.timestamp} after one at {self._last_obs}"
            )
        if now < observation.timestamp:
            raise TimestampRegression(f"observation at {observation.timestamp} ingested at {now}")
        self._advance(now)
        self._last_obs = observation.timestamp
        entry = self.entries.get(observation.attribute)
        if entry is None:
            return []
        entry.value = observation.value
        entry.last_refreshed = max(entry.last_refreshed, observation.timestamp)
        ev = CacheEvent(now, "ingest", observation.attribute, REFRESHED)
        self.events.append(ev)
        return [ev]
