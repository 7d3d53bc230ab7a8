from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronolint.errors import MissingCategoryError, WeightError
from chronolint.metrics import DELTA_CATEGORIES, DeltaSeries
from chronolint.significance import (
    WeightProfile,
    parse_weights,
    rank_hotspots,
    weighted_significance,
)

FIG4 = {"SECURITY": 0.5, "RELIABILITY": 0.3, "MAINTAINABILITY": 0.2}


def series(length: int, **category_deltas) -> DeltaSeries:
    deltas = {}
    present = {}
    for category in DELTA_CATEGORIES:
        values = category_deltas.get(category)
        if values is None:
            values = [0.0] * length
            present[category] = category != "COVERAGE"
        else:
            present[category] = True
        deltas[category] = list(values)
    return DeltaSeries(length=length, deltas=deltas, present=present)


# --- weight profile validation ----------------------------------------------


def test_weights_must_sum_to_one():
    with pytest.raises(WeightError):
        WeightProfile({"SECURITY": 0.6, "RELIABILITY": 0.6})


def test_weights_range_checked():
    with pytest.raises(WeightError):
        WeightProfile({"SECURITY": 1.5, "RELIABILITY": -0.5})


def test_unknown_category_rejected():
    with pytest.raises(WeightError):
        WeightProfile({"SPEED": 1.0})


def test_parse_weights():
    parsed = parse_weights("SECURITY=0.5,RELIABILITY=0.3,MAINTAINABILITY=0.2")
    assert parsed == FIG4


def test_parse_weights_bad_pair():
    with pytest.raises(WeightError):
        parse_weights("SECURITY")
    with pytest.raises(WeightError):
        parse_weights("SECURITY=abc")


# --- the formula -------------------------------------------------------------


def test_single_security_spike():
    # only vulnerabilities change, by +4 at i=2; max |delta| is 4
    deltas = series(5, SECURITY=[0.0, 0.0, 4.0, 0.0, 0.0])
    result = weighted_significance(deltas, WeightProfile(FIG4))
    assert result.scores[2] == pytest.approx(0.5, abs=1e-12)
    for i in (0, 1, 3, 4):
        assert result.scores[i] == 0.0


def test_all_identical_snapshots_zero():
    result = weighted_significance(series(4), WeightProfile(FIG4))
    assert result.scores == [0.0, 0.0, 0.0, 0.0]


def test_score_zero_at_origin():
    deltas = series(3, SECURITY=[0.0, 2.0, -2.0])
    result = weighted_significance(deltas, WeightProfile(FIG4))
    assert result.scores[0] == 0.0


def test_coverage_drop_is_worsening():
    deltas = series(3, COVERAGE=[0.0, -10.0, 10.0])
    result = weighted_significance(deltas, WeightProfile({"COVERAGE": 1.0}))
    assert result.scores[1] == pytest.approx(1.0, abs=1e-12)
    assert result.scores[2] == pytest.approx(-1.0, abs=1e-12)


def test_contributions_sum_to_score():
    deltas = series(
        4,
        SECURITY=[0.0, 1.0, -2.0, 3.0],
        RELIABILITY=[0.0, 2.0, 0.0, -1.0],
        MAINTAINABILITY=[0.0, -1.0, 5.0, 2.0],
    )
    result = weighted_significance(deltas, WeightProfile(FIG4))
    for i in range(4):
        total = sum(result.contributions[c][i] for c in DELTA_CATEGORIES)
        assert abs(total - result.scores[i]) <= 1e-12


def test_missing_category_rejected_without_renormalize():
    deltas = series(3)  # coverage absent
    with pytest.raises(MissingCategoryError):
        weighted_significance(deltas, WeightProfile({"COVERAGE": 0.5, "SECURITY": 0.5}))


def test_renormalize_rescales_remaining():
    deltas = series(3, SECURITY=[0.0, 2.0, 0.0])
    result = weighted_significance(
        deltas, WeightProfile({"COVERAGE": 0.5, "SECURITY": 0.5}), renormalize=True
    )
    assert result.weights["COVERAGE"] == 0.0
    assert result.weights["SECURITY"] == pytest.approx(1.0)
    assert result.scores[1] == pytest.approx(1.0, abs=1e-12)


def test_renormalize_with_nothing_left_fails():
    deltas = series(3)
    with pytest.raises(MissingCategoryError):
        weighted_significance(deltas, WeightProfile({"COVERAGE": 1.0}), renormalize=True)


def test_constant_weighted_category_yields_zeros():
    # weight on a category whose metric never changes: all scores zero
    deltas = series(4)  # SECURITY present but constant
    result = weighted_significance(deltas, WeightProfile({"SECURITY": 1.0}))
    assert result.scores == [0.0] * 4


def test_gap_deltas_contribute_zero():
    deltas = series(4, SECURITY=[0.0, 2.0, None, 1.0])
    result = weighted_significance(deltas, WeightProfile({"SECURITY": 1.0}))
    assert result.scores[2] == 0.0
    assert result.scores[1] == pytest.approx(1.0, abs=1e-12)


# --- ranking ------------------------------------------------------------------


def test_single_spike_ranks_first():
    deltas = series(5, SECURITY=[0.0, 0.0, 4.0, 0.0, 0.0])
    result = weighted_significance(deltas, WeightProfile({"SECURITY": 1.0}))
    assert result.ranking[0] == 2


def test_equal_spikes_older_first():
    deltas = series(9, SECURITY=[0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 3.0, 0.0])
    result = weighted_significance(deltas, WeightProfile({"SECURITY": 1.0}))
    top = rank_hotspots(result, 2)
    assert [t[0] for t in top] == [3, 7]


def test_top_n_larger_than_series():
    deltas = series(3, SECURITY=[0.0, 1.0, -1.0])
    result = weighted_significance(deltas, WeightProfile({"SECURITY": 1.0}))
    assert len(rank_hotspots(result, 10)) == 3


def test_absolute_ranking_option():
    deltas = series(4, SECURITY=[0.0, 1.0, -4.0, 2.0])
    result = weighted_significance(deltas, WeightProfile({"SECURITY": 1.0}))
    signed = rank_hotspots(result, 1)
    absolute = rank_hotspots(result, 1, absolute=True)
    assert signed[0][0] == 3  # biggest worsening
    assert absolute[0][0] == 2  # biggest magnitude


# --- properties ---------------------------------------------------------------

_deltas_strategy = st.lists(
    st.one_of(st.none(), st.floats(-100, 100, allow_nan=False)),
    min_size=1,
    max_size=12,
)


def _profile(weights_raw: list[float]) -> WeightProfile:
    total = sum(weights_raw)
    return WeightProfile(
        {c: w / total for c, w in zip(DELTA_CATEGORIES, weights_raw)}
    )


_weights_strategy = st.lists(
    st.floats(0.01, 1.0, allow_nan=False), min_size=5, max_size=5
)


@given(_deltas_strategy, _weights_strategy)
@settings(max_examples=80, deadline=None)
def test_boundedness(raw, weights_raw):
    n = len(raw)
    deltas = series(n, SECURITY=[0.0] + raw[1:], RELIABILITY=list(reversed(raw)))
    deltas.deltas["SECURITY"][0] = 0.0
    deltas.present["COVERAGE"] = True  # allow any weight placement
    result = weighted_significance(deltas, _profile(weights_raw))
    for s in result.scores:
        assert abs(s) <= 1.0 + 1e-9


@given(_deltas_strategy, st.floats(1e-6, 1e6, allow_nan=False))
@settings(max_examples=80, deadline=None)
def test_scale_invariance(raw, scale):
    n = len(raw)
    base = series(n, SECURITY=[0.0] + raw[1:])
    scaled_values = [None if v is None else v * scale for v in base.deltas["SECURITY"]]
    scaled = series(n, SECURITY=scaled_values)
    profile = WeightProfile({"SECURITY": 0.7, "RELIABILITY": 0.3})
    a = weighted_significance(base, profile)
    b = weighted_significance(scaled, profile)
    for x, y in zip(a.scores, b.scores):
        assert math.isclose(x, y, rel_tol=1e-9, abs_tol=1e-9)


@given(_deltas_strategy, _weights_strategy, _weights_strategy, st.floats(0, 1))
@settings(max_examples=80, deadline=None)
def test_weight_linearity(raw, w1_raw, w2_raw, alpha):
    n = len(raw)
    deltas = series(n, SECURITY=[0.0] + raw[1:], MAINTAINABILITY=list(raw))
    deltas.present["COVERAGE"] = True
    p1, p2 = _profile(w1_raw), _profile(w2_raw)
    mixed = WeightProfile(
        {c: alpha * p1.get(c) + (1 - alpha) * p2.get(c) for c in DELTA_CATEGORIES}
    )
    s1 = weighted_significance(deltas, p1).scores
    s2 = weighted_significance(deltas, p2).scores
    sm = weighted_significance(deltas, mixed).scores
    for i in range(n):
        expected = alpha * s1[i] + (1 - alpha) * s2[i]
        assert math.isclose(sm[i], expected, rel_tol=1e-9, abs_tol=1e-9)


@given(_deltas_strategy, _deltas_strategy)
@settings(max_examples=80, deadline=None)
def test_zero_weight_neutrality(raw_a, raw_b):
    n = min(len(raw_a), len(raw_b))
    profile = WeightProfile({"SECURITY": 1.0})
    one = series(n, SECURITY=[0.0] + raw_a[1:n], MAINTAINABILITY=raw_a[:n])
    two = series(n, SECURITY=[0.0] + raw_a[1:n], MAINTAINABILITY=raw_b[:n])
    assert (
        weighted_significance(one, profile).scores
        == weighted_significance(two, profile).scores
    )


@given(_deltas_strategy, st.floats(0.1, 10))
@settings(max_examples=50, deadline=None)
def test_ranking_invariant_under_category_rescaling(raw, scale):
    n = len(raw)
    base = series(n, SECURITY=[0.0] + raw[1:])
    scaled_values = [None if v is None else v * scale for v in base.deltas["SECURITY"]]
    scaled = series(n, SECURITY=scaled_values)
    profile = WeightProfile({"SECURITY": 1.0})
    assert (
        weighted_significance(base, profile).ranking
        == weighted_significance(scaled, profile).ranking
    )
