import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stereoacuity.errors import (
    DegenerateMarginals,
    NoEffectivePairs,
    UnmappableValue,
)
from stereoacuity.ol import OL
from stereoacuity.stats import (
    MeasurementRecord,
    Test,
    analyze,
    confusion_counts,
    landis_koch,
    median_iqr,
    near_band_edge,
    recode_far,
    recode_near,
    weighted_kappa,
    wilcoxon,
)
from tests.oracles import kappa_direct, median_sorted, quartiles_sorted, wilcoxon_enum

# --- recoding -------------------------------------------------------------


def test_recode_near_examples():
    assert recode_near(60) == 1
    assert recode_near(397) == 4
    assert recode_near(OL) == 5
    assert recode_near(40) == 1
    assert recode_near(15) == 1
    assert recode_near(79) == 2
    assert recode_near(120) == 2
    assert recode_near(240) == 3
    assert recode_near(480) == 4


def test_recode_near_snaps_to_nearest_level():
    assert recode_near(118) == 2   # 118 -> 119
    assert recode_near(0) == 1     # 0 -> 15
    assert recode_near(70) == 2    # 70 -> 79 (9 away) over 60 (10 away)


def test_recode_near_unmappable():
    with pytest.raises(UnmappableValue):
        recode_near(481)
    with pytest.raises(UnmappableValue):
        recode_near(-1)


def test_recode_far_examples():
    assert recode_far(16) == 2
    assert recode_far(26) == 4
    assert recode_far(OL) == 11
    assert recode_far(0) == 1
    assert recode_far(9) == 1
    assert recode_far(66) == 10
    assert recode_far(67) == 11  # beyond the instrument limit
    assert recode_far(9.6) == 2  # rounds half-up to 10
    with pytest.raises(UnmappableValue):
        recode_far(-3)


def test_recode_totality_on_published_levels():
    near_levels = [40, 79, 119, 159, 198, 199, 238, 278, 318, 357, 397]
    tno_levels = [15, 30, 60, 120, 240, 480]
    for v in near_levels + tno_levels:
        assert 1 <= recode_near(v) <= 5
    far_levels = [7, 13, 20, 26, 33, 40, 46, 53, 60, 66]
    for v in far_levels:
        assert 1 <= recode_far(v) <= 10


# --- weighted kappa ---------------------------------------------------------


def test_kappa_diagonal_is_one():
    counts = np.diag([4, 7, 2, 5])
    for scheme in ("linear", "quadratic"):
        assert weighted_kappa(counts, scheme).kappa == pytest.approx(1.0, abs=1e-12)


def test_kappa_independence_is_zero():
    row = np.array([3, 5, 2])
    col = np.array([4, 1, 6])
    counts = np.outer(row, col)
    for scheme in ("linear", "quadratic"):
        assert abs(weighted_kappa(counts, scheme).kappa) < 1e-12


def test_kappa_frozen_example():
    counts = [[6, 1, 0], [2, 8, 1], [0, 2, 10]]
    result = weighted_kappa(counts, "quadratic")
    assert result.kappa == pytest.approx(0.8378378378378385, abs=1e-12)
    assert result.kappa == pytest.approx(kappa_direct(counts, "quadratic"), abs=1e-12)
    linear = weighted_kappa(counts, "linear")
    assert linear.kappa == pytest.approx(kappa_direct(counts, "linear"), abs=1e-12)


def test_kappa_ci_contains_point():
    counts = [[6, 1, 0], [2, 8, 1], [0, 2, 10]]
    result = weighted_kappa(counts, "quadratic")
    assert result.se > 0
    assert result.ci95_low < result.kappa < result.ci95_high
    assert result.ci95_low == pytest.approx(result.kappa - 1.96 * result.se)


def test_kappa_degenerate():
    with pytest.raises(DegenerateMarginals):
        weighted_kappa([[5, 0], [0, 0]], "linear")  # all mass in one category
    with pytest.raises(DegenerateMarginals):
        weighted_kappa([[0, 0], [0, 0]], "linear")


@settings(max_examples=200)
@given(
    counts=st.lists(
        st.lists(st.integers(0, 20), min_size=3, max_size=3), min_size=3, max_size=3
    )
)
def test_kappa_matches_direct_oracle(counts):
    c = np.array(counts)
    if c.sum() == 0:
        return
    for scheme in ("linear", "quadratic"):
        try:
            result = weighted_kappa(c, scheme)
        except DegenerateMarginals:
            continue
        assert result.kappa == pytest.approx(kappa_direct(counts, scheme), abs=1e-12)


@settings(max_examples=100)
@given(
    counts=st.lists(
        st.lists(st.integers(0, 15), min_size=4, max_size=4), min_size=4, max_size=4
    )
)
def test_kappa_transpose_symmetry(counts):
    c = np.array(counts)
    if c.sum() == 0:
        return
    for scheme in ("linear", "quadratic"):
        try:
            a = weighted_kappa(c, scheme).kappa
            b = weighted_kappa(c.T, scheme).kappa
        except DegenerateMarginals:
            continue
        assert a == pytest.approx(b, abs=1e-12)


@settings(max_examples=100)
@given(
    a=st.integers(0, 10), b=st.integers(0, 10), c=st.integers(0, 10), d=st.integers(0, 10)
)
def test_kappa_two_categories_schemes_agree(a, b, c, d):
    counts = np.array([[a, b], [c, d]])
    if counts.sum() == 0:
        return
    try:
        lin = weighted_kappa(counts, "linear").kappa
        quad = weighted_kappa(counts, "quadratic").kappa
    except DegenerateMarginals:
        return
    assert lin == pytest.approx(quad, abs=1e-12)


# --- Landis-Koch labels -----------------------------------------------------


def test_landis_koch_bands():
    assert landis_koch(-0.2) == "Poor"
    assert landis_koch(0.040) == "Slight"
    assert landis_koch(0.30) == "Fair"
    assert landis_koch(0.50) == "Moderate"
    assert landis_koch(0.604) == "Moderate"  # strict banding, not the looser call
    assert landis_koch(0.715) == "Substantial"
    assert landis_koch(0.85) == "Almost Perfect"
    assert landis_koch(1.0) == "Almost Perfect"


def test_landis_koch_boundary_flag():
    assert near_band_edge(0.604)
    assert near_band_edge(0.001)
    assert not near_band_edge(0.5)


# --- Wilcoxon ---------------------------------------------------------------


def test_wilcoxon_symmetric_null():
    result = wilcoxon([(0, 1), (0, -1), (0, 2), (0, -2)])
    assert result.z == pytest.approx(0.0)
    assert result.p_two_sided == pytest.approx(1.0)


def test_wilcoxon_all_positive_exact():
    result = wilcoxon([(0, d) for d in (1, 2, 3, 4, 5)])
    assert result.method == "exact"
    assert result.w_plus == 15.0
    assert result.p_two_sided == pytest.approx(0.0625)
    w_oracle, p_oracle = wilcoxon_enum([1, 2, 3, 4, 5])
    assert result.w_plus == w_oracle
    assert result.p_two_sided == pytest.approx(p_oracle)


def test_wilcoxon_zeros_discarded():
    result = wilcoxon([(1, 1), (2, 2), (0, 3), (0, 5)])
    assert result.n_effective == 2
    with pytest.raises(NoEffectivePairs):
        wilcoxon([(1, 1), (2, 2)])
    with pytest.raises(NoEffectivePairs):
        wilcoxon([])


def test_wilcoxon_normal_approx_near_exact():
    rng = np.random.default_rng(7)
    diffs = rng.normal(0.3, 1.0, size=20)
    diffs = diffs[diffs != 0]
    result = wilcoxon([(0.0, d) for d in diffs])
    assert result.method == "normal_approx"
    _, p_oracle = wilcoxon_enum(diffs.tolist())
    assert result.p_two_sided == pytest.approx(p_oracle, abs=0.02)


@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_wilcoxon_exact_vs_approx_property(data):
    n = data.draw(st.integers(8, 12))
    # draw distinct magnitudes so the exact path applies
    magnitudes = data.draw(
        st.lists(
            st.floats(0.01, 100.0, allow_nan=False),
            min_size=n,
            max_size=n,
            unique=True,
        )
    )
    signs = data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n))
    diffs = [s * m for s, m in zip(signs, magnitudes)]
    pairs = [(0.0, d) for d in diffs]
    exact = wilcoxon(pairs)
    assert exact.method == "exact"
    approx = wilcoxon(pairs, method="normal_approx")
    assert abs(exact.p_two_sided - approx.p_two_sided) <= 0.02
    assert approx.z == exact.z
    _, p_oracle = wilcoxon_enum(diffs)
    assert exact.p_two_sided == pytest.approx(p_oracle, abs=1e-12)


def test_wilcoxon_ties_use_normal_approx():
    result = wilcoxon([(0, 1), (0, 1), (0, -1), (0, 2)])
    assert result.method == "normal_approx"


# --- medians and report -----------------------------------------------------


@settings(max_examples=100)
@given(values=st.lists(st.floats(-1000, 1000), min_size=1, max_size=40))
def test_median_iqr_matches_sort_oracle(values):
    med, q1, q3 = median_iqr(values)
    assert med == pytest.approx(median_sorted(values), abs=1e-9)
    o1, o3 = quartiles_sorted(values)
    assert q1 == pytest.approx(o1, abs=1e-9)
    assert q3 == pytest.approx(o3, abs=1e-9)


def _fixture_records():
    from stereoacuity.dataset import read_dataset
    from importlib.resources import files

    return read_dataset(str(files("stereoacuity").joinpath("data/sample_dataset.csv")))


def test_analyze_fixture_medians():
    report = analyze(_fixture_records())
    hd1 = next(s for s in report.summaries if s.test is Test.HD and s.day == 1)
    assert hd1.median == pytest.approx(18.5)
    assert hd1.n == 12
    assert hd1.n_ol == 0
    values = [7, 9, 23, 15, 28, 13, 34, 2, 8, 25, 22, 39]
    assert hd1.median == pytest.approx(median_sorted(values))
    o1, o3 = quartiles_sorted(values)
    assert hd1.iqr_low == pytest.approx(o1)
    assert hd1.iqr_high == pytest.approx(o3)


def test_analyze_fixture_recodes_everything():
    report = analyze(_fixture_records())
    # Every test/day present, every cumulative distribution ends at 100%.
    assert len(report.summaries) == 8
    for s in report.summaries:
        assert s.cumulative_pct[-1] == pytest.approx(100.0)
        assert all(
            a <= b + 1e-9 for a, b in zip(s.cumulative_pct, s.cumulative_pct[1:])
        )


def test_analyze_duplicated_day_kappa_one():
    records = _fixture_records()
    doubled = [r for r in records if r.day == 1]
    doubled += [
        MeasurementRecord(subject_id=r.subject_id, test=r.test, day=2, value=r.value)
        for r in doubled
    ]
    report = analyze(doubled)
    for comparison in report.between_days:
        assert comparison.kappa is not None
        assert comparison.kappa.kappa == pytest.approx(1.0, abs=1e-12)


def test_analyze_missing_side_dropped():
    records = [
        MeasurementRecord("a", Test.HD, 1, 10.0),
        MeasurementRecord("a", Test.HD, 2, 12.0),
        MeasurementRecord("b", Test.HD, 1, 20.0),  # no day 2
        MeasurementRecord("c", Test.HD, 1, 30.0),
        MeasurementRecord("c", Test.HD, 2, 28.0),
    ]
    report = analyze(records)
    comparison = next(c for c in report.between_days if c.name.startswith("HD"))
    assert comparison.n_pairs == 2
    assert comparison.n_missing == 1


def test_analyze_empty_errors():
    with pytest.raises(NoEffectivePairs):
        analyze([])


def test_analyze_report_serializes():
    import json

    report = analyze(_fixture_records())
    payload = json.dumps(report.to_dict())
    assert "summaries" in payload
    text = report.text_tables()
    assert "HD" in text and "Median" in text


def test_confusion_counts_shape():
    counts = confusion_counts([1, 2, 5], [1, 3, 5], 5)
    assert counts.shape == (5, 5)
    assert counts.sum() == 3
    assert counts[0, 0] == 1 and counts[4, 4] == 1 and counts[1, 2] == 1
