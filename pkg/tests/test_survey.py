"""
Tests for the Monte Carlo survey and the trichotomy verdict.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import pytest

from real_subbundle_lab.curve import TopologicalType, classify
from real_subbundle_lab.divisors import LineBundleTopType
from real_subbundle_lab.errors import BadParity, InsufficientData, RecipeUnavailable
from real_subbundle_lab.survey import (
    BATTERY,
    RecipeName,
    SurveyResult,
    TrialRecord,
    expected_case,
    make_recipe,
    run_battery,
    run_survey,
    trichotomy_verdict,
)

LAMBDA_111 = LineBundleTopType.from_bits("111")
LAMBDA_100 = LineBundleTopType.from_bits("100")
LAMBDA_1 = LineBundleTopType.from_bits("1")
LAMBDA_10 = LineBundleTopType.from_bits("10")

# Extra trials absorb degenerate discards so each cell still keeps 10^4.
FULL_SCALE_TRIALS = 11_000
FULL_SCALE_MIN = 10_000


@pytest.mark.unit
def test_all_real_on_m_curve_gives_four(c4):
    """The all-real recipe on an M-curve always counts four."""
    result = run_survey(c4, LAMBDA_111, RecipeName.ALL_REAL, trials=200, seed=7)
    assert result.support == [4]
    assert result.nondegenerate + result.degenerate_discard_count == 200
    assert result.violations == []


@pytest.mark.unit
@pytest.mark.parametrize(
    "recipe,count",
    [
        (RecipeName.ALL_REAL, 4),
        (RecipeName.REAL_PLUS_CONJUGATE_PAIR, 2),
        (RecipeName.IOTA_TAU_PAIR, 2),
        (RecipeName.ANTIREAL_PAIR, 0),
    ],
)
def test_recipe_supports(c4, recipe, count):
    """Each recipe stays inside its count support."""
    result = run_survey(c4, LAMBDA_100, recipe, trials=100, seed=3)
    assert result.support == [count]


@pytest.mark.unit
def test_survey_is_reproducible_across_thread_counts(c2):
    """Results do not depend on the thread count."""
    first = run_survey(c2, LAMBDA_1, RecipeName.UNIFORM_PROJECTIVELY_REAL, 150, seed=11, threads=1)
    second = run_survey(c2, LAMBDA_1, RecipeName.UNIFORM_PROJECTIVELY_REAL, 150, seed=11, threads=4)
    assert first.to_dict() == second.to_dict()
    assert [r.csv_row() for r in first.records] == [r.csv_row() for r in second.records]


@pytest.mark.unit
def test_different_seeds_differ(c2):
    """Different seeds draw different divisors."""
    a = run_survey(c2, LAMBDA_1, RecipeName.UNIFORM_PROJECTIVELY_REAL, 100, seed=1)
    b = run_survey(c2, LAMBDA_1, RecipeName.UNIFORM_PROJECTIVELY_REAL, 100, seed=2)
    assert [r.divisor for r in a.records] != [r.divisor for r in b.records]


@pytest.mark.unit
def test_uniform_never_gives_zero_without_antireal_locus(c1):
    """Without anti-real arcs the uniform recipe never counts zero."""
    result = run_survey(c1, LAMBDA_1, RecipeName.UNIFORM_PROJECTIVELY_REAL, 300, seed=5)
    assert 0 not in result.histogram
    assert result.support == [2, 4]


@pytest.mark.unit
def test_recipe_availability(c1, c4):
    """Recipes needing absent regions are unavailable."""
    with pytest.raises(RecipeUnavailable):
        make_recipe(c1, LAMBDA_1, RecipeName.ANTIREAL_PAIR)
    with pytest.raises(RecipeUnavailable):
        make_recipe(c4, LAMBDA_111, RecipeName.REAL_PLUS_CONJUGATE_PAIR)
    with pytest.raises(BadParity):
        make_recipe(c4, LAMBDA_1, RecipeName.ALL_REAL)
    uniform = make_recipe(c4, LAMBDA_111, RecipeName.UNIFORM_PROJECTIVELY_REAL)
    assert [p.name for p in uniform.parts] == [RecipeName.ALL_REAL]


@pytest.mark.unit
def test_battery_skips_unavailable_recipes(c1):
    """The battery skips recipes a curve cannot run."""
    results = run_battery(c1, LAMBDA_1, trials=50, seed=0)
    assert list(results) == [
        "all_real",
        "real_plus_conjugate_pair",
        "iota_tau_pair",
        "uniform_projectively_real",
    ]


@pytest.mark.unit
def test_trials_must_be_positive(c4):
    """A non-positive trial count is rejected."""
    with pytest.raises(ValueError):
        run_survey(c4, LAMBDA_111, RecipeName.ALL_REAL, trials=0, seed=0)


@pytest.mark.unit
def test_expected_cases():
    """Each curve and determinant maps to its expected case."""
    assert expected_case(TopologicalType(1, 0, 0), LAMBDA_1) == "case1"
    assert expected_case(TopologicalType(3, 0, 3), LAMBDA_111) == "case2"
    assert expected_case(TopologicalType(3, 0, 3), LAMBDA_100) == "case3"
    assert expected_case(TopologicalType(2, 1, 2), LAMBDA_10) == "case3"
    assert expected_case(TopologicalType(1, 1, 1), LAMBDA_1) == "case3"


@pytest.mark.unit
@pytest.mark.parametrize(
    "name,bits,case",
    [
        ("c1", "1", "case1"),
        ("c4", "111", "case2"),
        ("c2", "1", "case3"),
        ("c3", "10", "case3"),
        ("c4", "100", "case3"),
    ],
)
def test_trichotomy_at_reduced_scale(fixtures, name, bits, case):
    """The trichotomy holds on a reduced battery."""
    curve = fixtures[name]
    lam = LineBundleTopType.from_bits(bits)
    results = run_battery(curve, lam, trials=120, seed=7)
    verdict = trichotomy_verdict(classify(curve), lam, results, min_trials=100)
    assert verdict.verdict == case
    assert not verdict.is_violation
    assert verdict.to_dict()["offending"] == []


@pytest.mark.unit
def test_insufficient_data(c4):
    """A cell below min_trials raises InsufficientData."""
    results = run_battery(c4, LAMBDA_111, trials=20, seed=0)
    with pytest.raises(InsufficientData):
        trichotomy_verdict(classify(c4), LAMBDA_111, results, min_trials=1000)


def _fake_result(counts):
    records = [
        TrialRecord(i, "all_real", count, (), "111", ({"x": [0.0, 0.0], "mult": 1},))
        for i, count in enumerate(counts)
    ]
    histogram = {}
    for count in counts:
        histogram[count] = histogram.get(count, 0) + 1
    return SurveyResult("all_real", 0, len(counts), histogram, {}, records, [])


@pytest.mark.unit
def test_unexpected_support_is_a_violation():
    """A count outside the expected support is a violation."""
    verdict = trichotomy_verdict(
        TopologicalType(3, 0, 3), LAMBDA_111, {"all_real": _fake_result([4, 4, 2])}, min_trials=1
    )
    assert verdict.is_violation
    assert verdict.observed == "case1"
    assert verdict.expected == "case2"
    assert verdict.offending[0]["problems"] == ["unexpected_count_2"]


@pytest.mark.unit
def test_wrong_case_is_a_violation():
    """Support matching another case is a violation."""
    verdict = trichotomy_verdict(
        TopologicalType(1, 0, 0), LAMBDA_1, {"all_real": _fake_result([0, 2, 4])}, min_trials=1
    )
    assert verdict.is_violation
    assert verdict.observed == "case3"
    assert verdict.expected == "case1"


@pytest.mark.unit
def test_result_dict_records_discards_and_caveat(c4):
    """Result dicts record discards and the caveat."""
    payload = run_survey(c4, LAMBDA_100, RecipeName.ANTIREAL_PAIR, 50, seed=1).to_dict()
    assert payload["trials"] == 50
    assert payload["discard_total"] == sum(payload["discards"].values())
    assert "not checked" in payload["caveat"]


@pytest.mark.slow
@pytest.mark.parametrize(
    "name,bits,case",
    [
        ("c1", "1", "case1"),
        ("c4", "111", "case2"),
        ("c2", "1", "case3"),
        ("c3", "10", "case3"),
        ("c4", "100", "case3"),
    ],
)
def test_trichotomy_at_full_scale(fixtures, name, bits, case):
    """Every cell keeps at least 10^4 nondegenerate trials and lands in its case."""
    curve = fixtures[name]
    lam = LineBundleTopType.from_bits(bits)
    results = run_battery(curve, lam, trials=FULL_SCALE_TRIALS, seed=2024, threads=4)
    verdict = trichotomy_verdict(classify(curve), lam, results, min_trials=FULL_SCALE_MIN)
    assert verdict.verdict == case
    assert not verdict.is_violation
    for result in results.values():
        assert result.nondegenerate >= FULL_SCALE_MIN
        assert all(count in (0, 2, 4) for count in result.histogram)


@pytest.mark.unit
def test_battery_order_is_fixed():
    """Battery results come in a fixed recipe order."""
    assert BATTERY[0] is RecipeName.ALL_REAL
    assert BATTERY[-1] is RecipeName.UNIFORM_PROJECTIVELY_REAL
