"""Drift estimators: hand-checked values, cross-estimator identities,
plug-in variances and the jump-detection diagnostic."""

import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oujump import (
    CompoundPoissonJumps,
    DegeneratePathError,
    FilterSpec,
    GammaJumps,
    LevyModel,
    ObservationGrid,
    OuModel,
    RngStream,
    UnsupportedDiagnosticError,
    UnsupportedModelError,
    asymptotic_variance_lse,
    asymptotic_variance_mle,
    jump_detection_confusion,
    jump_filtered_mle,
    least_squares,
    oracle_discretized_mle,
    resolve_threshold,
    simulate_path,
    stationary_second_moment,
    studentized_statistic,
    write_estimates_csv,
)

HAND_T = np.array([0.0, 1.0, 2.0])
HAND_X = np.array([1.0, 0.5, 0.25])

GAUSSIAN = OuModel(a=2.0, levy=LevyModel(1.0, None))
CP2 = OuModel(a=2.0, levy=LevyModel(1.0, CompoundPoissonJumps(1.0, np.sqrt(2.0))))
CP5 = OuModel(a=5.0, levy=LevyModel(1.0, CompoundPoissonJumps(1.0, np.sqrt(2.0))))
GAMMA = OuModel(a=2.0, levy=LevyModel(1.0, GammaJumps(1.0, 1.0)))


def test_hand_example_all_kept():
    # increments -0.5 and -0.25; num = 0.625, den = s_t = 1.25
    res = jump_filtered_mle((HAND_T, HAND_X), FilterSpec.absolute(1.0))
    assert res.a_hat == pytest.approx(0.5, abs=1e-15)
    assert res.s_t == pytest.approx(1.25, abs=1e-15)
    assert (res.kept, res.filtered) == (2, 0)
    assert res.threshold == 1.0


def test_hand_example_tie_is_kept():
    # v = 0.25 keeps the |dx| = 0.25 increment and drops the 0.5 one
    res = jump_filtered_mle((HAND_T, HAND_X), FilterSpec.absolute(0.25))
    assert (res.kept, res.filtered) == (1, 1)
    assert res.a_hat == pytest.approx(0.125 / 1.25, abs=1e-15)


def test_hand_example_all_filtered():
    res = jump_filtered_mle((HAND_T, HAND_X), FilterSpec.absolute(0.1))
    assert res.a_hat == 0.0
    assert (res.kept, res.filtered) == (0, 2)
    assert res.s_t == pytest.approx(1.25, abs=1e-15)


def test_filter_off_equals_least_squares_bitwise():
    path = simulate_path(CP2, ObservationGrid(n=500, horizon=5.0), RngStream(40))
    off = jump_filtered_mle(path, FilterSpec.off())
    lse = least_squares(path)
    assert off.a_hat == lse.a_hat
    assert off.s_t == lse.s_t
    assert off.filtered == lse.filtered == 0
    assert math.isinf(off.threshold) and math.isinf(lse.threshold)


def test_threshold_monotone_in_filtered_count():
    path = simulate_path(CP2, ObservationGrid(n=2000, horizon=20.0), RngStream(41))
    counts = [
        jump_filtered_mle(path, FilterSpec.absolute(v)).filtered
        for v in (0.05, 0.1, 0.3, 1.0, 5.0)
    ]
    assert counts == sorted(counts, reverse=True)
    for v, c in zip((0.05, 0.1, 0.3, 1.0, 5.0), counts):
        total = jump_filtered_mle(path, FilterSpec.absolute(v))
        assert total.kept + total.filtered == path.grid.n
        del c


def test_s_t_is_filter_independent():
    path = simulate_path(CP2, ObservationGrid(n=800, horizon=8.0), RngStream(42))
    reference = least_squares(path).s_t
    for spec in (FilterSpec.exponent(0.3), FilterSpec.absolute(0.2), FilterSpec.off()):
        assert jump_filtered_mle(path, spec).s_t == reference
    assert oracle_discretized_mle(path).s_t == reference


def test_oracle_equals_lse_on_pure_gaussian():
    path = simulate_path(GAUSSIAN, ObservationGrid(n=600, horizon=6.0), RngStream(43))
    ora = oracle_discretized_mle(path)
    lse = least_squares(path)
    assert ora.a_hat == lse.a_hat
    assert ora.kept == path.grid.n and ora.filtered == 0
    assert math.isinf(ora.threshold)


def test_oracle_lse_gap_is_the_jump_term():
    path = simulate_path(CP2, ObservationGrid(n=1500, horizon=15.0), RngStream(44))
    ora = oracle_discretized_mle(path)
    lse = least_squares(path)
    gap = float(np.dot(path.x[:-1], path.dj)) / ora.s_t
    assert ora.a_hat - lse.a_hat == pytest.approx(gap, rel=1e-12, abs=1e-15)


def test_filtered_equals_oracle_when_nothing_crosses():
    path = simulate_path(GAUSSIAN, ObservationGrid(n=200, horizon=2.0), RngStream(45))
    v = float(np.max(np.abs(np.diff(path.x))))
    assert v > 0
    filt = jump_filtered_mle(path, FilterSpec.absolute(v))  # tie kept
    assert filt.filtered == 0
    assert filt.a_hat == oracle_discretized_mle(path).a_hat


def test_stationary_moments():
    assert stationary_second_moment(GAUSSIAN) == pytest.approx(0.25, rel=1e-14)
    assert stationary_second_moment(CP2) == pytest.approx(0.75, rel=1e-14)
    # asymmetric jumps push the mean off zero: E X^2 = var/(2a) + (mean/a)^2
    # = (1 + 1)/4 + (1/2)^2 = 0.75 for unit-shape unit-rate gamma jumps
    assert stationary_second_moment(GAMMA) == pytest.approx(0.75, rel=1e-14)


def test_asymptotic_variance_plug_ins():
    assert asymptotic_variance_mle(CP2) == pytest.approx(4.0 / 3.0, rel=1e-14)
    assert asymptotic_variance_mle(CP5) == pytest.approx(10.0 / 3.0, rel=1e-14)
    assert asymptotic_variance_mle(GAUSSIAN) == pytest.approx(4.0, rel=1e-14)
    assert asymptotic_variance_lse(GAUSSIAN) == pytest.approx(4.0, rel=1e-14)
    assert asymptotic_variance_mle(GAMMA) == pytest.approx(4.0 / 3.0, rel=1e-14)
    # the least squares variance is 2a for any centered driver
    for model in (CP2, GAUSSIAN):
        assert asymptotic_variance_lse(model) == pytest.approx(2 * model.a, rel=1e-14)
    assert asymptotic_variance_lse(CP5) == pytest.approx(10.0, rel=1e-14)


def test_variance_ratio_grows_with_jump_share():
    heavy = OuModel(a=2.0, levy=LevyModel(1.0, CompoundPoissonJumps(10.0, np.sqrt(2.0))))
    ratio = asymptotic_variance_lse(heavy) / asymptotic_variance_mle(heavy)
    assert ratio == pytest.approx(21.0, rel=1e-12)


def test_avar_explicit_formula_cross_check():
    # sigma_w^2 / E X^2 must equal 2a sigma_w^2 / (sigma_w^2 + lam sig_j^2)
    for lam, sig_j, a in ((1.0, np.sqrt(2.0), 2.0), (5.0, 1.3, 4.0), (0.5, 2.0, 1.0)):
        model = OuModel(a=a, levy=LevyModel(1.0, CompoundPoissonJumps(lam, sig_j)))
        direct = 2 * a * 1.0 / (1.0 + lam * sig_j**2)
        assert asymptotic_variance_mle(model) == pytest.approx(direct, rel=1e-12)


def test_avar_requires_brownian_component():
    model = OuModel(a=2.0, levy=LevyModel(0.0, CompoundPoissonJumps(1.0, 1.0)))
    with pytest.raises(UnsupportedModelError, match="sigma_w > 0"):
        asymptotic_variance_mle(model)


def test_studentized_requires_brownian_component():
    res = jump_filtered_mle((HAND_T, HAND_X), FilterSpec.off())
    with pytest.raises(UnsupportedModelError, match="sigma_w > 0"):
        studentized_statistic(res, 2.0, 0.0)


def test_studentized_value():
    res = jump_filtered_mle((HAND_T, HAND_X), FilterSpec.absolute(1.0))
    expect = math.sqrt(1.25) / 2.0 * (0.5 - 2.0)
    assert studentized_statistic(res, 2.0, 2.0) == pytest.approx(expect, rel=1e-14)


def test_degenerate_path_rejected():
    t = np.arange(5.0)
    with pytest.raises(DegeneratePathError, match="s_t = 0"):
        jump_filtered_mle((t, np.zeros(5)), FilterSpec.off())
    with pytest.raises(DegeneratePathError):
        least_squares((t, np.zeros(5)))


@pytest.mark.parametrize(
    "t,x,message",
    [
        ([0.0, 1.0], [1.0, 2.0], "at least 3 observations"),
        ([0.0, 1.0, 1.0], [1.0, 2.0, 3.0], "strictly increasing"),
        ([0.0, 2.0, 1.0], [1.0, 2.0, 3.0], "strictly increasing"),
        ([[0.0, 1.0, 2.0]], [[1.0, 2.0, 3.0]], "1-d"),
        ([0.0, 1.0, 2.0], [1.0, 2.0], "equal-length"),
    ],
)
def test_series_validation(t, x, message):
    with pytest.raises(ValueError, match=message):
        jump_filtered_mle((np.asarray(t, dtype=float), np.asarray(x, dtype=float)))


def test_resolve_threshold():
    assert resolve_threshold(FilterSpec.exponent(0.3), 0.01) == pytest.approx(
        0.01**0.3, rel=1e-15
    )
    assert resolve_threshold(FilterSpec.absolute(0.7), 123.0) == 0.7
    assert math.isinf(resolve_threshold(FilterSpec.off(), 0.01))
    with pytest.raises(ValueError, match="dt"):
        resolve_threshold(FilterSpec.exponent(0.3), 0.0)


def test_external_series_uses_max_spacing_for_threshold():
    t = np.array([0.0, 0.5, 2.0, 2.5, 3.0])
    x = np.array([1.0, 0.9, 0.8, 0.7, 0.6])
    res = jump_filtered_mle((t, x), FilterSpec.exponent(0.3))
    assert res.threshold == pytest.approx(1.5**0.3, rel=1e-15)


def test_filter_spec_validation():
    with pytest.raises(ValueError, match=r"open interval \(0, 0.5\)"):
        FilterSpec.exponent(0.6)
    with pytest.raises(ValueError, match=r"open interval"):
        FilterSpec.exponent(0.0)
    with pytest.raises(ValueError, match="finite positive"):
        FilterSpec.absolute(-1.0)
    with pytest.raises(ValueError, match="finite positive"):
        FilterSpec.absolute(math.nan)
    with pytest.raises(ValueError, match="mode must be one of"):
        FilterSpec(mode="bogus")


def test_studentized_errors_fine_grid():
    """At dt = 0.001 the filter threshold clears the Brownian band and the
    studentized statistic is close to standard normal."""
    grid = ObservationGrid.from_dt(10_000, 0.001)
    filt = FilterSpec.exponent(0.3)
    stats = np.empty(500)
    for r in range(500):
        p = simulate_path(CP2, grid, RngStream(14, r), stationary_start=True)
        stats[r] = studentized_statistic(jump_filtered_mle(p, filt), 2.0, 1.0)
    coverage = np.mean(np.abs(stats) <= 1.96)
    assert 0.92 <= coverage <= 0.98, f"95% CI coverage came out {coverage}"
    assert 0.8 <= np.var(stats, ddof=1) <= 1.25


def test_confusion_pure_gaussian_all_kept():
    path = simulate_path(GAUSSIAN, ObservationGrid(n=300, horizon=3.0), RngStream(46))
    c = jump_detection_confusion(path, FilterSpec.absolute(100.0))
    assert c.correct_keep == 300
    assert c.missed == c.false_flags == c.correct_flag == 0
    assert c.total == 300
    assert c.misclassified_fraction == 0.0


def test_confusion_rejects_infinite_activity():
    path = simulate_path(GAMMA, ObservationGrid(n=20, horizon=2.0), RngStream(47))
    with pytest.raises(UnsupportedDiagnosticError, match="infinite-activity"):
        jump_detection_confusion(path, FilterSpec.exponent(0.3))


def test_confusion_detects_most_jumps():
    grid = ObservationGrid.from_dt(2_000, 0.01)
    filt = FilterSpec.exponent(0.3)
    flagged = jumps = 0
    for r in range(100):
        c = jump_detection_confusion(simulate_path(CP2, grid, RngStream(17, r)), filt)
        flagged += c.correct_flag
        jumps += c.correct_flag + c.missed
    assert 0.4 <= flagged / jumps <= 0.9, f"detection fraction {flagged / jumps}"


def test_estimates_csv(tmp_path):
    path = simulate_path(CP2, ObservationGrid(n=100, horizon=1.0), RngStream(48))
    results = [
        jump_filtered_mle(path, FilterSpec.exponent(0.3)),
        oracle_discretized_mle(path),
        least_squares(path),
    ]
    out = tmp_path / "estimates.csv"
    write_estimates_csv(results, out)
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["estimator", "a_hat", "kept", "filtered", "threshold", "s_t"]
    assert len(rows) == 4
    for row, res in zip(rows[1:], results):
        assert row[0] == res.estimator
        assert float(row[1]) == res.a_hat  # %.17g survives the round trip
        assert int(row[2]) == res.kept and int(row[3]) == res.filtered
        assert float(row[5]) == res.s_t


# -- property checks ---------------------------------------------------------

series = st.integers(min_value=0, max_value=2**32 - 1)


def synth(seed: int):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 40))
    t = np.cumsum(rng.uniform(0.05, 1.0, size=n))
    x = rng.normal(size=n)
    if not np.any(x[:-1]):
        x[0] = 1.0
    return t, x


@settings(max_examples=25, deadline=None)
@given(seed=series, v=st.floats(min_value=1e-3, max_value=10.0))
def test_property_counts_and_s_t(seed, v):
    t, x = synth(seed)
    res = jump_filtered_mle((t, x), FilterSpec.absolute(v))
    assert res.kept + res.filtered == len(x) - 1
    assert res.s_t == least_squares((t, x)).s_t


@settings(max_examples=25, deadline=None)
@given(seed=series, scale=st.floats(min_value=0.01, max_value=100.0))
def test_property_lse_scale_invariant(seed, scale):
    t, x = synth(seed)
    base = least_squares((t, x)).a_hat
    scaled = least_squares((t, x * scale)).a_hat
    assert scaled == pytest.approx(base, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(seed=series, v1=st.floats(min_value=0.01, max_value=5.0), bump=st.floats(min_value=0.0, max_value=5.0))
def test_property_filter_monotone(seed, v1, bump):
    t, x = synth(seed)
    lo = jump_filtered_mle((t, x), FilterSpec.absolute(v1)).filtered
    hi = jump_filtered_mle((t, x), FilterSpec.absolute(v1 + bump)).filtered
    assert hi <= lo
