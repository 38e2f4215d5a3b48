import json
from pathlib import Path

import numpy as np
import pytest

from eigenmark import harness
from eigenmark.grover import WinnerScenario
from eigenmark.harness import (
    ExperimentPlan,
    ResultsFormatError,
    derive_seed,
    enumerate_scenarios,
    expected_counts,
    run_plan,
    sample_counts,
)
from eigenmark.metrics import ShotCounts, marking_factor
from eigenmark.schemes import MARKING_SCHEMES, NULL_ANGLE, SchemeKind, run_scheme

import oracles

GOLDEN = Path(__file__).parent / "golden" / "exact_n2.json"


def test_enumeration_class_sizes():
    scns = enumerate_scenarios(2)
    assert len(scns) == 16
    sizes = [sum(1 for s in scns if len(s.winners) == k) for k in range(5)]
    assert sizes == [1, 4, 6, 4, 1]
    assert scns[0].winners == frozenset() and len(scns[-1].winners) == 4
    assert [len(s.winners) for s in scns] == sorted(len(s.winners) for s in scns)
    assert [len(enumerate_scenarios(n)) for n in (1, 3)] == [4, 256]
    with pytest.raises(ValueError):
        enumerate_scenarios(5)


def test_sampling_is_deterministic():
    probs = {"00": 0.1, "01": 0.2, "10": 0.3, "11": 0.4}
    a = sample_counts(probs, 1024, 99)
    assert a == sample_counts(probs, 1024, 99)
    assert a.shots == 1024
    assert sample_counts(probs, 1024, 100) != a


def test_sampling_degenerate_distribution():
    c = sample_counts({"0": 1.0, "1": 0.0}, 10, 0)
    assert c.counts == {"0": 10, "1": 0}


def test_sampling_law_of_large_numbers():
    probs = {"00": 0.1, "01": 0.2, "10": 0.3, "11": 0.4}
    c = sample_counts(probs, 1_000_000, 5)
    for k, p in probs.items():
        assert abs(c.get(k) / 1e6 - p) < 0.005


def test_sampling_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        sample_counts({"0": 0.5, "1": 0.6}, 10, 0)
    with pytest.raises(ValueError):
        sample_counts({"0": 1.5, "1": -0.5}, 10, 0)


def test_expected_counts_rounding():
    c = expected_counts({"00": 0.25, "01": 0.25, "10": 0.25, "11": 0.25}, 1024)
    assert c.counts == dict.fromkeys(["00", "01", "10", "11"], 256)
    # 1.5 and 2.5 round to even
    c = expected_counts({"a": 1.5 / 4, "b": 2.5 / 4}, 4)
    assert c.counts == {"a": 2, "b": 2}


def test_derived_seeds_are_distinct():
    seeds = {
        derive_seed(7, scheme, mask, rep) for scheme in MARKING_SCHEMES for mask in range(16) for rep in range(40)
    }
    assert len(seeds) == 3 * 16 * 40
    assert derive_seed(7, SchemeKind.EIGENMARKING, 3, 0) != derive_seed(8, SchemeKind.EIGENMARKING, 3, 0)


def test_default_plan_coverage(default_results):
    recs = default_results.records
    assert len(recs) == 3 * 16 * 40
    keys = {(r.scheme, r.scenario.bitmask, r.rep) for r in recs}
    assert len(keys) == len(recs)
    assert all(r.counts.shots == 1024 for r in recs)
    assert default_results.meta["null_angle"] == NULL_ANGLE
    assert default_results.meta["null_angle_source"] == "calibrated"


def test_thread_count_does_not_change_bytes(monkeypatch):
    plan = ExperimentPlan(reps=5, shots=256, master_seed=3)
    one = run_plan(plan, threads=1).dumps()
    assert run_plan(plan, threads=4).dumps() == one
    monkeypatch.setenv(harness.THREADS_ENV, "3")
    assert run_plan(plan).dumps() == one


def test_json_round_trip(tmp_path, default_results):
    path = tmp_path / "r.json"
    harness.save(default_results, path)
    back = harness.load(path)
    assert back.plan == default_results.plan
    assert back.dumps() == default_results.dumps()
    assert harness.build_tables(back) == default_results.tables


def test_malformed_json_reports_offset():
    with pytest.raises(ResultsFormatError, match="byte offset 13"):
        harness.loads('{"plan": {}, ')
    # the accented key is one character but two bytes
    with pytest.raises(ResultsFormatError, match="byte offset 7"):
        harness.loads('{"é": x}')
    with pytest.raises(ResultsFormatError, match="schema"):
        harness.loads('{"plan": {"n": 2}}')


def test_load_missing_file(tmp_path):
    with pytest.raises(OSError):
        harness.load(tmp_path / "nope.json")


def test_csv_headers(default_results):
    t = default_results.tables
    assert harness.table_csv(t, "table1").splitlines()[0] == "scheme,winners,mean,std"
    assert harness.table_csv(t, "table2").splitlines()[0] == "scheme,margin,min,mean,max,std"
    assert harness.table_csv(t, "table3").splitlines()[0] == "scheme,D,D_rel,d,d_rel"
    assert len(harness.table_csv(t, "table1").splitlines()) == 1 + 3 * 5
    fig = harness.figure_counts_csv(default_results).splitlines()
    assert fig[0] == "scheme,winners,rep,label,count"


def test_table_text_layout(default_results):
    text = harness.table_text(default_results.tables, "table1").splitlines()
    assert len(text) == 4 and text[1].startswith("eigen")
    assert "(" in text[1]


def test_golden_exact_mode():
    plan = ExperimentPlan(n=2, reps=1, shots=1024, mode="exact")
    assert run_plan(plan, threads=1).dumps() == GOLDEN.read_text()


def test_golden_agrees_with_dense_oracle():
    golden = json.loads(GOLDEN.read_text())
    pipelines = {
        "eigen": lambda s: oracles.eigen_pipeline(2, s.winners),
        "null": lambda s: oracles.eigen_pipeline(2, s.winners, NULL_ANGLE),
        "subtle": lambda s: oracles.subtle_pipeline(2, s.winners),
    }
    for rec in golden["records"]:
        scn = WinnerScenario(2, rec["winners"])
        kind = SchemeKind.parse(rec["scheme"])
        width = 2 + kind.n_tags
        probs = oracles.reported(pipelines[rec["scheme"]](scn), width)
        counts = ShotCounts({k: int(round(1024 * p)) for k, p in probs.items()})
        assert rec["metrics"]["M"] == pytest.approx(marking_factor(counts, kind), abs=2 / 1024)


def test_sampled_means_converge_to_exact():
    exact = run_plan(ExperimentPlan(reps=1, mode="exact"), threads=1).tables["table1"]
    big = run_plan(ExperimentPlan(reps=4, shots=100_000), threads=1).tables["table1"]
    for e, s in zip(exact, big):
        assert (e["scheme"], e["winners"]) == (s["scheme"], s["winners"])
        assert abs(e["mean"] - s["mean"]) < 0.06


def test_plan_validation():
    with pytest.raises(ValueError):
        ExperimentPlan(reps=0)
    with pytest.raises(ValueError):
        ExperimentPlan(mode="noisy")
    with pytest.raises(ValueError):
        ExperimentPlan(schemes=("original",))
    assert ExperimentPlan.from_json(ExperimentPlan().to_json()) == ExperimentPlan()


def test_calibration_picks_the_default_angle():
    cal = harness.calibrate_null_angle()
    assert cal.chosen == NULL_ANGLE
    best = cal.candidates[NULL_ANGLE]
    assert best["stands_out"] and best["suppressed"]
    assert set(cal.candidates) == {np.pi / 2, -np.pi / 2, np.pi}


def test_exact_mode_repetitions_are_identical():
    res = run_plan(ExperimentPlan(reps=3, mode="exact", schemes=("subtle",)), threads=1)
    by_scn = {}
    for r in res.records:
        by_scn.setdefault(r.scenario.bitmask, set()).add(tuple(sorted(r.counts.counts.items())))
    assert all(len(v) == 1 for v in by_scn.values())


def test_reported_matches_scheme_run(default_results):
    rec = default_results.records[0]
    run = run_scheme(rec.scheme, rec.scenario)
    assert set(rec.counts.counts) == set(run.reported)
