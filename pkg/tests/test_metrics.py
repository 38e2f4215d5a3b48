import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from eigenmark.grover import WinnerScenario
from eigenmark.metrics import (
    ScenarioExcludedError,
    ShotCounts,
    UndefinedMetricError,
    aggregate_stats,
    compute_record,
    distinguishability_avg,
    distinguishability_worst,
    marking_factor,
    marking_terms,
    winning_margin,
)
from eigenmark.schemes import SchemeKind


def labels(width):
    return [format(i, f"0{width}b") for i in range(2**width)]


def counts4(**kw):
    c = dict.fromkeys(labels(4), 0)
    c.update({k.lstrip("_"): v for k, v in kw.items()})
    return ShotCounts(c)


def test_marking_factor_eigen_example():
    c = counts4(_0101=192, _1000=64)
    assert marking_terms(c, "eigen") == (192, 64)
    assert marking_factor(c, SchemeKind.EIGENMARKING) == 0.5


def test_marking_factor_extremes():
    assert marking_factor(counts4(_0111=10), "eigen") == 1.0
    assert marking_factor(counts4(_1001=10), "eigen") == -1.0
    with pytest.raises(UndefinedMetricError):
        marking_factor(counts4(_0000=1024), "eigen")


def test_marking_factor_null_uses_null_label_only():
    c = counts4(_0100=30, _1011=10, _1000=500)
    assert marking_terms(c, "null") == (30, 10)
    assert marking_factor(c, "null") == 0.5


def test_marking_factor_subtle():
    c = ShotCounts({"000": 5, "001": 40, "010": 1, "011": 0, "100": 0, "101": 0, "110": 0, "111": 120})
    assert marking_terms(c, "subtle") == (40, 120)
    assert marking_factor(c, "subtle") == pytest.approx(-0.5)


def test_marking_factor_rejects_original():
    with pytest.raises(ValueError):
        marking_factor(ShotCounts({"00": 1, "01": 2, "10": 0, "11": 0}), "original")


def test_winning_margin_example():
    scn = WinnerScenario(2, {"01"})
    c = counts4(_0101=300, _0110=100, _1000=150)
    assert winning_margin(c, scn, "eigen", "local") == 2.0
    assert winning_margin(c, scn, "eigen", "global") == 1.0


def test_winning_margin_uses_weakest_winner():
    scn = WinnerScenario(2, {"01", "10"})
    c = counts4(_0101=300, _0110=90, _0100=60)
    assert winning_margin(c, scn, "eigen", "local") == pytest.approx(0.5)


def test_winning_margin_errors():
    c = counts4(_0101=3)
    with pytest.raises(ScenarioExcludedError):
        winning_margin(c, WinnerScenario(2), "eigen")
    with pytest.raises(ScenarioExcludedError):
        winning_margin(c, WinnerScenario(2, {"00", "01", "10", "11"}), "eigen")
    with pytest.raises(UndefinedMetricError):
        winning_margin(c, WinnerScenario(2, {"01"}), "eigen")
    with pytest.raises(ValueError):
        winning_margin(c, WinnerScenario(2, {"01"}), "eigen", mode="both")


def test_compute_record_leaves_undefined_as_none():
    rec = compute_record(counts4(_0000=10), WinnerScenario(2, {"01"}), "eigen")
    assert rec.marking_factor is None and rec.margin_local is None
    assert rec.to_json() == {"M": None, "W_global": -1.0, "W_local": None}
    rec = compute_record(counts4(_0101=4), WinnerScenario(2, {"01"}), "eigen")
    assert rec.margin_global is None and rec.margin_local is None
    rec = compute_record(counts4(_0101=2, _1000=2), WinnerScenario(2), "eigen")
    assert rec.to_json() == {"M": 0.0}


def test_shot_counts_validation():
    with pytest.raises(ValueError):
        ShotCounts({})
    with pytest.raises(ValueError):
        ShotCounts({"0": 1, "00": 1})
    with pytest.raises(ValueError):
        ShotCounts({"0": -1})
    assert ShotCounts({"0": 3, "1": 4}).shots == 7


def test_distinguishability_worst():
    samples = {0: [0.0, 0.1], 1: [0.3, 0.5], 2: [0.2, 0.9]}
    assert distinguishability_worst(samples) == pytest.approx(0.1)
    assert distinguishability_worst({0: [0.5], 1: [0.2]}) == pytest.approx(-0.3)
    with pytest.raises(ValueError):
        distinguishability_worst({0: [], 1: [0.2]})


def test_distinguishability_average_example():
    means = dict(enumerate([0.01, 0.44, 0.46, 0.45, 0.95]))
    d = distinguishability_avg(means)
    assert d == pytest.approx(0.532, abs=5e-4)
    assert d / abs(means[0]) == pytest.approx(53.19, abs=0.05)
    assert distinguishability_avg(means, k=3) == pytest.approx(0.43, abs=5e-3)


def test_distinguishability_average_undefined():
    with pytest.raises(UndefinedMetricError):
        distinguishability_avg({0: 0.5, 1: 0.4, 2: 0.9})
    with pytest.raises(ValueError):
        distinguishability_avg({1: 0.4})


def test_aggregate_stats():
    s = aggregate_stats([0.0, 2.0])
    assert (s.min, s.mean, s.max) == (0.0, 1.0, 2.0)
    assert s.std == pytest.approx(math.sqrt(2))
    assert aggregate_stats([0.3]).std == 0.0
    with pytest.raises(ValueError):
        aggregate_stats([])


# -- properties ---------------------------------------------------------------

count_vals = st.integers(0, 10_000)
eigen_counts = st.lists(count_vals, min_size=16, max_size=16).map(lambda v: ShotCounts(dict(zip(labels(4), v))))


@given(eigen_counts, st.sampled_from(["eigen", "null"]))
def test_marking_factor_bounded(c, scheme):
    w, w0 = marking_terms(c, scheme)
    assume(w + w0 > 0)
    assert -1 <= marking_factor(c, scheme) <= 1


@given(eigen_counts, st.integers(1, 50))
def test_marking_factor_scale_invariant(c, k):
    w, w0 = marking_terms(c, "eigen")
    assume(w + w0 > 0)
    assert marking_factor(c.scaled(k), "eigen") == pytest.approx(marking_factor(c, "eigen"), abs=1e-12)


@given(eigen_counts, st.integers(1, 14))
def test_winning_margin_lower_bound(c, mask):
    scn = WinnerScenario.from_bitmask(2, mask)
    for mode in ("global", "local"):
        try:
            assert winning_margin(c, scn, "eigen", mode) >= -1
        except UndefinedMetricError:
            pass


@given(
    st.dictionaries(st.integers(0, 4), st.lists(st.floats(-1, 1), min_size=1, max_size=5), min_size=2),
    st.floats(-1, 1),
)
def test_worst_case_translation_invariant(samples, shift):
    assume(0 in samples and len(samples) > 1)
    moved = {i: [v + shift for v in vs] for i, vs in samples.items()}
    assert distinguishability_worst(moved) == pytest.approx(distinguishability_worst(samples), abs=1e-9)
