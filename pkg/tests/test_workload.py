import pytest

from cclab.errors import ConfigInvalid
from cclab.workload import (
    DEFAULT_SEED,
    AttributeProfile,
    ObservationEvent,
    QueryEvent,
    WorkloadConfig,
    count_lookups,
    generate_trace,
    read_trace,
    scenario,
    scenario_road_work,
    scenario_shared_cmp,
    trace_to_jsonl,
    with_overrides,
    write_trace,
)


def road(**kw):
    return with_overrides(scenario_road_work(), **kw)


@pytest.mark.parametrize("queries,lookups", [(150, 600), (250, 1000), (350, 1400), (500, 2000)])
def test_lookup_count_is_queries_times_four(queries, lookups):
    trace = generate_trace(road(num_queries=queries))
    assert count_lookups(trace) == lookups
    assert sum(isinstance(ev, QueryEvent) for ev in trace) == queries


def test_default_scenario_shape():
    cfg = scenario_road_work()
    assert len(cfg.profiles) == 8
    assert cfg.attributes_per_query == 4
    assert cfg.seed == DEFAULT_SEED


def test_same_seed_same_bytes():
    assert trace_to_jsonl(generate_trace(road(seed=7))) == trace_to_jsonl(generate_trace(road(seed=7)))


def test_different_seed_different_trace():
    assert trace_to_jsonl(generate_trace(road(seed=7))) != trace_to_jsonl(generate_trace(road(seed=8)))


@pytest.mark.parametrize("cfg", [road(), scenario_shared_cmp(), road(selection="weighted")])
def test_times_non_decreasing(cfg):
    times = [ev.time for ev in generate_trace(cfg)]
    assert times == sorted(times)


def test_observations_before_queries_at_equal_time():
    cfg = WorkloadConfig(
        profiles=(AttributeProfile("a", 3.0, 0.0), AttributeProfile("b", 3.0, 0.0)),
        num_queries=20,
        query_interarrival_jitter=0.0,
        attributes_per_query=1,
    )
    trace = generate_trace(cfg)
    for prev, ev in zip(trace, trace[1:]):
        if prev.time == ev.time:
            assert not (isinstance(prev, QueryEvent) and isinstance(ev, ObservationEvent))


def test_top_selection_asks_for_focus():
    cfg = road(focus=("speed", "weather", "dust_level", "lane_closures"))
    queries = [ev for ev in generate_trace(cfg) if isinstance(ev, QueryEvent)]
    assert all(q.attributes == cfg.focus for q in queries)


def test_mixed_selection_share():
    cfg = with_overrides(scenario_shared_cmp(), num_queries=3000)
    focus = cfg.resolved_focus()
    queries = [ev for ev in generate_trace(cfg) if isinstance(ev, QueryEvent)]
    share = sum(q.attributes == focus for q in queries) / len(queries)
    assert abs(share - 1 / 3) < 0.03
    others = [q for q in queries if q.attributes != focus]
    assert all(not set(q.attributes) & set(focus) for q in others)
    assert all(len(set(q.attributes)) == 4 for q in queries)


def test_jsonl_round_trip(tmp_path):
    trace = generate_trace(road(num_queries=40))
    path = tmp_path / "trace.jsonl"
    write_trace(trace, path)
    assert read_trace(path) == trace


def test_unsorted_trace_rejected(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text('{"kind": "query", "time": 5, "attributes": ["a"]}\n'
                    '{"kind": "query", "time": 4, "attributes": ["a"]}\n')
    with pytest.raises(ConfigInvalid):
        read_trace(path)


def test_config_dict_round_trip():
    cfg = scenario_shared_cmp()
    assert WorkloadConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize(
    "kw",
    [
        dict(num_queries=0),
        dict(attributes_per_query=9),
        dict(selection="zipf"),
        dict(focus=("speed", "nope", "weather", "dust_level")),
        dict(query_interarrival_mean=0.0),
    ],
)
def test_invalid_config(kw):
    with pytest.raises(ConfigInvalid):
        generate_trace(road(**kw))


def test_duration_cap():
    with pytest.raises(ConfigInvalid):
        generate_trace(road(num_queries=100, duration_cap=50.0))


def test_unknown_scenario():
    with pytest.raises(ConfigInvalid):
        scenario("harbour")
