"""Replay a trace against one cache and report on it."""

from __future__ import annotations

from typing import Sequence

from .ahp import AttributeRanking
from .freshness_cache import DEFAULT_TOP_K, DEFAULT_WINDOW_SIZE, FreshnessCache, FreshnessConfig
from .metrics import SimulationReport, compute_report
from .policies import BaselineCache, PolicyKind
from .workload import ObservationEvent, QueryEvent, TraceEvent


def make_cache(
    policy,
    threshold: float,
    capacity,
    ranking: AttributeRanking,
    universe: int,
    window_size: int = DEFAULT_WINDOW_SIZE,
    top_k: int = DEFAULT_TOP_K,
    recency: str = "lru",
):
    kind = PolicyKind.parse(policy)
    if kind is PolicyKind.PFPA:
        config = FreshnessConfig(threshold, capacity, window_size, top_k)
        return FreshnessCache(config, ranking, universe)
    return BaselineCache(kind, capacity, threshold, universe, recency)


def replay(trace: Sequence[TraceEvent], cache) -> list:
    """Drive ``cache`` through ``trace``; returns the cache's event log.

    A fetch on a miss returns the latest reading the provider has published
    for that attribute (``None`` before its first reading).
    """
    latest = {}
    for ev in trace:
        if isinstance(ev, ObservationEvent):
            latest[ev.observation.attribute] = ev.observation.value
            cache.ingest(ev.observation, ev.time)
        elif isinstance(ev, QueryEvent):
            for attribute in ev.attributes:
                cache.lookup(attribute, ev.time, latest.get(attribute))
    return cache.events


def simulate(
    trace: Sequence[TraceEvent],
    policy,
    threshold: float,
    capacity,
    ranking: AttributeRanking,
    universe: int,
    window_size: int = DEFAULT_WINDOW_SIZE,
    top_k: int = DEFAULT_TOP_K,
    recency: str = "lru",
    expired_counts_as_hit: bool = False,
) -> tuple[SimulationReport, list]:
    cache = make_cache(policy, threshold, capacity, ranking, universe, window_size, top_k, recency)
    events = replay(trace, cache)
    queries = sum(1 for ev in trace if isinstance(ev, QueryEvent))
    report = compute_report(
        events, PolicyKind.parse(policy).value, threshold, queries, cache.capacity, expired_counts_as_hit
    )
    return report, events
