import json

import pytest

from cclab import harness
from cclab.cli import cli_main
from cclab.errors import CellFailure, ConfigInvalid, InconsistentJudgments
from cclab.harness import load_spec, run_experiment, spec_from_dict
from cclab.metrics import CSV_COLUMNS

SMALL = {
    "name": "small",
    "policies": ["pfpa", "lfu"],
    "thresholds": [10, 20],
    "queries": [20],
    "capacities": ["50%", 2],
    "repetitions": 2,
    "seed": 5,
    "workload": {"scenario": "road_work"},
}

INCONSISTENT = {
    "attributes": ["x", "y", "z"],
    "judgments": [
        {"a": "x", "b": "y", "value": 2},
        {"a": "x", "b": "z", "value": 0.5},
        {"a": "y", "b": "z", "value": 4},
    ],
    "cr_threshold": 0.10,
}


def small(**kw):
    return spec_from_dict({**SMALL, **kw})


def test_cell_count_and_files(tmp_path):
    result = run_experiment(small(), tmp_path)
    assert len(result.cells) == 2 * 2 * 1 * 2 * 2
    assert len(result.rows) == 8
    assert (tmp_path / "cell_pfpa_10_20_50pct_0.json").is_file()
    assert (tmp_path / "cell_lfu_20_20_2_1.json").is_file()
    header = (tmp_path / "sweep_small.csv").read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    mirror = json.loads((tmp_path / "sweep_small.json").read_text())
    assert mirror["complete"] and mirror["ranking"]["ranks"]["roadblock_presence"] == 1


def test_cells_share_traces_across_policies(tmp_path):
    result = run_experiment(small())
    lookups = {(c.queries, c.rep): r.lookups for c, r in result.cells}
    assert set(lookups.values()) == {80}


@pytest.mark.parametrize("field", ["policies", "thresholds", "queries", "capacities"])
def test_empty_list_rejected(field):
    with pytest.raises(ConfigInvalid):
        small(**{field: []})


@pytest.mark.parametrize("kw", [dict(repetitions=0), dict(policies=["arc"]), dict(thresholds=[-1])])
def test_invalid_spec(kw):
    with pytest.raises(ConfigInvalid):
        small(**kw)


def test_missing_field():
    with pytest.raises(ConfigInvalid):
        spec_from_dict({k: v for k, v in SMALL.items() if k != "policies"})


def test_inconsistent_judgments_abort(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(INCONSISTENT))
    spec = spec_from_dict({**SMALL, "judgments": str(path)})
    with pytest.raises(InconsistentJudgments, match="Inconsistent pairwise comparisons"):
        run_experiment(spec)


def test_failing_cell_named_and_marked_incomplete(tmp_path, monkeypatch):
    real = harness.simulate

    def flaky(trace, policy, threshold, *args, **kw):
        if policy == "lfu" and threshold == 20:
            raise RuntimeError("boom")
        return real(trace, policy, threshold, *args, **kw)

    monkeypatch.setattr(harness, "simulate", flaky)
    with pytest.raises(CellFailure) as err:
        run_experiment(small(), tmp_path)
    assert "policy=lfu T=20 Q=20 capacity=50% rep=0" in str(err.value)
    assert (tmp_path / "sweep_small.INCOMPLETE").is_file()
    assert (tmp_path / "sweep_small.partial.csv").is_file()
    assert not (tmp_path / "sweep_small.csv").exists()


def test_workers_do_not_change_bytes(tmp_path):
    run_experiment(small(), tmp_path / "one", workers=1)
    run_experiment(small(), tmp_path / "two", workers=2)
    names = sorted(p.name for p in (tmp_path / "one").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "two").iterdir())
    for name in names:
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_event_logs_optional(tmp_path):
    run_experiment(small(write_events=True, policies=["pfpa"], thresholds=[10]), tmp_path)
    assert (tmp_path / "cell_pfpa_10_20_2_0.jsonl").is_file()


def test_env_and_flag_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("CCLAB_OUT", str(tmp_path / "env"))
    assert harness.resolve_output_dir(None, "spec") == tmp_path / "env"
    assert harness.resolve_output_dir(tmp_path / "flag", "spec") == tmp_path / "flag"
    monkeypatch.delenv("CCLAB_OUT")
    assert str(harness.resolve_output_dir(None, "spec")) == "spec"


@pytest.mark.parametrize("name", harness.SHIPPED_SPECS)
def test_shipped_specs_load(name):
    spec = load_spec(name)
    assert spec.repetitions == 10
    assert spec.name == name.removesuffix(".json")


# -- command line -----------------------------------------------------------


def test_cli_rank(capsys):
    assert cli_main(["rank", "--judgments", "roadwork.json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(sum(doc["weights"].values()) - 1) < 1e-12
    assert sorted(doc["ranks"].values()) == list(range(1, 9))


def test_cli_simulate_deterministic(capsys):
    argv = ["simulate", "--policy", "pfpa", "--threshold", "20", "--queries", "500", "--seed", "7"]
    assert cli_main(argv) == 0
    first = capsys.readouterr().out
    assert cli_main(argv) == 0
    assert capsys.readouterr().out == first
    assert first.splitlines()[1].startswith("pfpa,20,500,8,")


def test_cli_unknown_flag(capsys):
    assert cli_main(["simulate", "--frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_cli_errors_are_one_line(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(INCONSISTENT))
    assert cli_main(["rank", "--judgments", str(path)]) == 3
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and "Inconsistent pairwise comparisons" in err
    assert cli_main(["simulate", "--capacity", "0"]) == 4
    assert cli_main(["replay", "--trace", str(tmp_path / "none.jsonl")]) == 5


def test_cli_replay_matches_simulate(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    argv = ["--policy", "lfu", "--capacity", "50%"]
    assert cli_main(["simulate", "--queries", "60", "--export-trace", str(trace), *argv]) == 0
    simulated = capsys.readouterr().out
    assert cli_main(["replay", "--trace", str(trace), *argv]) == 0
    assert capsys.readouterr().out == simulated


def test_cli_sweep_and_report(capsys, tmp_path):
    spec = tmp_path / "small.json"
    spec.write_text(json.dumps(SMALL))
    out = tmp_path / "out"
    assert cli_main(["sweep", "--spec", str(spec), "--out", str(out)]) == 0
    swept = capsys.readouterr().out
    assert swept == (out / "sweep_small.csv").read_text()
    assert cli_main(["report", str(out)]) == 0
    assert capsys.readouterr().out == swept


def test_cli_out_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CCLAB_OUT", str(tmp_path / "env"))
    assert cli_main(["simulate", "--queries", "10", "--seed", "1"]) == 0
    assert list((tmp_path / "env").glob("simulate_*.csv"))
    assert cli_main(["simulate", "--queries", "10", "--seed", "1", "--out", str(tmp_path / "flag")]) == 0
    assert list((tmp_path / "flag").glob("simulate_*.csv"))
