import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cclab.ahp import AttributeRanking
from cclab.errors import ConfigInvalid, TimestampRegression
from cclab.events import EVICTED_EXPIRED, INSERTED, REFRESHED, LookupOutcome, Observation
from cclab.freshness_cache import FreshnessCache, FreshnessConfig, SlidingWindow, new_cache, resolve_capacity

from reference import NaiveFreshness

ATTRS = ["a", "b", "c", "d", "e", "f", "g", "h"]
WEIGHTS = [0.30, 0.20, 0.15, 0.12, 0.09, 0.07, 0.04, 0.03]


RANKING = AttributeRanking.from_weights(ATTRS, WEIGHTS)


@pytest.fixture
def ranking():
    return RANKING


def cache_for(ranking, T=20.0, capacity="100%", window=64, k=4):
    return FreshnessCache(FreshnessConfig(T, capacity, window, k), ranking)


def outcomes(events):
    return [e.outcome for e in events]


# -- construction -----------------------------------------------------------


def test_admission_is_top_k(ranking):
    assert new_cache(FreshnessConfig(20), ranking).admission == {"a", "b", "c", "d"}


def test_top_k_equal_n_admits_everything(ranking):
    assert cache_for(ranking, k=8).admission == set(ATTRS)


@pytest.mark.parametrize(
    "capacity,universe,expected",
    [("20%", 10, 2), (0.2, 10, 2), ("60%", 20, 12), ("80%", 20, 16), ("20%", 15, 3), (3, 8, 3), ("100%", 8, 8)],
)
def test_capacity_resolution(capacity, universe, expected):
    assert resolve_capacity(capacity, universe) == expected


@pytest.mark.parametrize("capacity", [0, -1, "0%", "120%", 1.5, "lots", True])
def test_bad_capacity(capacity):
    with pytest.raises(ConfigInvalid):
        resolve_capacity(capacity, 10)


@pytest.mark.parametrize("kw", [dict(T=0), dict(window=0), dict(k=0), dict(k=9)])
def test_bad_config(ranking, kw):
    with pytest.raises(ConfigInvalid):
        cache_for(ranking, **kw)


# -- ingest -----------------------------------------------------------------


def test_first_observation_inserts(ranking):
    c = cache_for(ranking)
    assert outcomes(c.ingest(Observation("a", 1, 0.0), 0.0)) == [INSERTED]


def test_repeat_observation_refreshes(ranking):
    c = cache_for(ranking)
    c.ingest(Observation("a", 1, 0.0), 0.0)
    assert outcomes(c.ingest(Observation("a", 2, 5.0), 5.0)) == [REFRESHED]
    assert c.entries["a"].last_refreshed == 5.0
    assert c.entries["a"].value == 2


def test_lone_old_reading_expires_entry(ranking):
    c = cache_for(ranking)
    c.ingest(Observation("a", 1, 0.0), 0.0)
    events = c.ingest(Observation("b", 1, 21.0), 21.0)
    assert [(e.attribute, e.outcome) for e in events] == [("a", EVICTED_EXPIRED), ("b", INSERTED)]
    assert "a" not in c
    assert c.cmu.stale_flags["a"] is True


def test_newer_reading_keeps_entry(ranking):
    c = cache_for(ranking)
    c.ingest(Observation("a", 1, 0.0), 0.0)
    c.ingest(Observation("a", 1, 10.0), 10.0)
    events = c.ingest(Observation("b", 1, 21.0), 21.0)
    assert outcomes(events) == [INSERTED]
    assert "a" in c and not c.cmu.stale_flags["a"]


def test_age_exactly_threshold_is_fresh(ranking):
    c = cache_for(ranking)
    c.ingest(Observation("a", 1, 0.0), 0.0)
    assert outcomes(c.ingest(Observation("b", 1, 20.0), 20.0)) == [INSERTED]
    assert c.lookup("a", 20.0) is LookupOutcome.HIT


def test_inadmissible_observation_ignored(ranking):
    c = cache_for(ranking)
    assert outcomes(c.ingest(Observation("h", 1, 0.0), 0.0)) == ["ignored_not_admissible"]
    assert len(c) == 0


def test_regressing_timestamp(ranking):
    c = cache_for(ranking)
    c.ingest(Observation("a", 1, 5.0), 5.0)
    with pytest.raises(TimestampRegression):
        c.ingest(Observation("b", 1, 4.0), 5.0)
    with pytest.raises(TimestampRegression):
        c.lookup("a", 4.0)


def test_capacity_evicts_lowest_weight(ranking):
    c = cache_for(ranking, capacity=2)
    c.ingest(Observation("c", 1, 0.0), 0.0)
    c.ingest(Observation("a", 1, 1.0), 1.0)
    events = c.ingest(Observation("b", 1, 2.0), 2.0)
    assert [(e.attribute, e.outcome) for e in events] == [("c", "evicted_capacity"), ("b", INSERTED)]


def test_window_overflow_is_silent():
    w = SlidingWindow(2)
    w.push(Observation("a", 0, 0.0))
    w.push(Observation("b", 0, 1.0))
    dropped = w.push(Observation("c", 0, 2.0))
    assert dropped.attribute == "a"
    assert [o.attribute for o in w.buffer] == ["b", "c"]
    assert list(w.pop_older_than(30.0, 20.0)) == [
        (Observation("b", 0, 1.0), False),
        (Observation("c", 0, 2.0), False),
    ]


# -- lookup -----------------------------------------------------------------


def test_lookup_fresh_is_hit(ranking):
    c = cache_for(ranking)
    c.ingest(Observation("a", 1, 100.0), 100.0)
    assert c.lookup("a", 110.0) is LookupOutcome.HIT


def test_lookup_expired_is_replaced(ranking):
    c = cache_for(ranking)
    c.ingest(Observation("a", 1, 100.0), 100.0)
    assert c.lookup("a", 125.0, value=7) is LookupOutcome.EXPIRED_HIT
    assert c.entries["a"].last_refreshed == 125.0
    assert c.entries["a"].value == 7


def test_lookup_never_seen_is_miss_then_cached(ranking):
    c = cache_for(ranking)
    assert c.lookup("b", 3.0) is LookupOutcome.MISS
    assert "b" in c
    assert c.lookup("b", 4.0) is LookupOutcome.HIT


def test_lookup_inadmissible_miss_not_cached(ranking):
    c = cache_for(ranking)
    assert c.lookup("g", 3.0) is LookupOutcome.MISS
    assert "g" not in c
    assert c.lookup("g", 4.0) is LookupOutcome.MISS


def test_unranked_attribute_never_cached(ranking):
    c = cache_for(ranking, k=8)
    assert c.lookup("zz", 1.0) is LookupOutcome.MISS
    assert "zz" not in c


# -- context freshness ------------------------------------------------------


def test_context_fresh_when_all_top_k_fresh(ranking):
    c = cache_for(ranking)
    for i, a in enumerate("abcd"):
        c.ingest(Observation(a, 1, float(i)), float(i))
    assert c.context_is_fresh(10.0)


def test_context_stale_when_one_entry_aged(ranking):
    c = cache_for(ranking)
    c.ingest(Observation("a", 1, 0.0), 0.0)
    for a in "bcd":
        c.ingest(Observation(a, 1, 5.0), 5.0)
    assert not c.context_is_fresh(21.0)


def test_empty_cache_is_not_fresh(ranking):
    assert not cache_for(ranking).context_is_fresh(0.0)


# -- invariants and the naive oracle -----------------------------------------


def random_stream(rng, n_events, attrs=ATTRS):
    t = 0.0
    out = []
    for _ in range(n_events):
        t += float(rng.choice([0.0, rng.uniform(0, 6)]))
        a = attrs[int(rng.integers(len(attrs)))]
        out.append(("obs" if rng.random() < 0.6 else "look", a, round(t, 3)))
    return out


def drive(cache, stream):
    served = []
    for kind, a, t in stream:
        if kind == "obs":
            cache.ingest(Observation(a, t, t), t)
        else:
            entry = cache.entries.get(a)
            outcome = cache.lookup(a, t, t)
            if outcome is LookupOutcome.HIT:
                served.append(entry.age(t))
        assert len(cache) <= cache.capacity
        assert len(cache.window) <= cache.config.window_size
        assert set(cache.entries) <= cache.admission
        ts = [o.timestamp for o in cache.window.buffer]
        assert ts == sorted(ts)
    return served


def drive_naive(naive, stream):
    for kind, a, t in stream:
        if kind == "obs":
            naive.ingest(a, t, t)
        else:
            naive.lookup(a, t)
    return naive.events


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("window", [10**6, 5])
def test_matches_naive_reference(ranking, seed, window):
    rng = np.random.default_rng(seed)
    stream = random_stream(rng, int(rng.integers(20, 201)))
    T = float(rng.choice([5.0, 10.0, 20.0]))
    capacity = int(rng.integers(1, 5))
    c = cache_for(ranking, T=T, capacity=capacity, window=window)
    drive(c, stream)
    naive = NaiveFreshness(T, capacity, c.admission, ranking.weights, window)
    assert c.events == drive_naive(naive, stream)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), T=st.sampled_from([3.0, 10.0, 20.0]), window=st.integers(1, 40))
def test_no_stale_service_and_sound_evictions(seed, T, window):
    c = cache_for(RANKING, T=T, capacity=3, window=window)
    served = drive(c, random_stream(np.random.default_rng(seed), 150))
    assert all(age <= T for age in served)

    # every expiry eviction concerns an entry older than T at that moment
    c = cache_for(RANKING, T=T, capacity=3, window=window)
    for kind, a, t in random_stream(np.random.default_rng(seed), 150):
        before = {x: e.last_refreshed for x, e in c.entries.items()}
        n = len(c.events)
        if kind == "obs":
            c.ingest(Observation(a, t, t), t)
        else:
            c.lookup(a, t, t)
        for e in c.events[n:]:
            if e.outcome == EVICTED_EXPIRED:
                assert t - before[e.attribute] > T


def test_replay_determinism(ranking):
    stream = random_stream(np.random.default_rng(11), 200)
    runs = []
    for _ in range(2):
        c = cache_for(ranking, T=10.0, capacity=2, window=8)
        drive(c, stream)
        runs.append(c.events)
    assert runs[0] == runs[1]
