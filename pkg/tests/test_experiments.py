import numpy as np
import pytest
from begfad.experiments import (CSV_HEADER, EstimatorKind, SamplerKind, draw_samples, estimate_magnetization,
                                estimate_rows, sweep, validate_sides, waste_report)
from begfad.experiments.stats import (intervals_disjoint, log_linear_fit, lower_confidence_bound,
                                      mean_and_std_error, within_sigmas)
from begfad.lattice import build_box


def test_mean_and_std_error():
    mean, std_error = mean_and_std_error(np.array([1, -1, 1, -1]))
    assert mean == 0.0
    assert std_error == pytest.approx(np.std([1, -1, 1, -1], ddof=1) / 2)
    assert mean_and_std_error(np.array([3])) == (3.0, 0.0)


def test_lower_confidence_bound():
    assert lower_confidence_bound(1.0, 0.0) == 1.0
    assert lower_confidence_bound(1.0, 0.1, 0.99) == pytest.approx(1.0 - 0.2326348, abs=1e-6)


def test_log_linear_fit_of_an_exponential():
    xs = np.arange(1, 8)
    fit = log_linear_fit(xs, 3.0 * np.exp(-0.4 * xs))
    assert fit.slope == pytest.approx(-0.4)
    assert fit.intercept == pytest.approx(np.log(3.0))
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.points == 7


def test_log_linear_fit_skips_non_positive_values():
    assert log_linear_fit([1, 2, 3], [0.5, 0.0, 0.125]).points == 2
    assert np.isnan(log_linear_fit([1, 2], [0.5, -1.0]).slope)


def test_interval_helpers():
    assert within_sigmas(1.0, 1.2, 0.1)
    assert not within_sigmas(1.0, 1.5, 0.1)
    assert intervals_disjoint(1.0, 0.01, 0.5, 0.01)
    assert not intervals_disjoint(1.0, 0.1, 0.9, 0.1)


@pytest.mark.parametrize("sides", [[], [3, 4], [5, 3], [3, 3], [0]])
def test_invalid_side_lists(sides):
    with pytest.raises(ValueError):
        validate_sides(sides)


def test_single_site_estimate_is_one_half():
    estimate = estimate_magnetization(build_box(2, 1), SamplerKind.CFTP, EstimatorKind.SPIN_AVERAGE, 4000, seed=1)
    assert estimate.samples_accepted == 4000
    assert estimate.samples_wasted == 0
    assert estimate.waste_rate is None
    assert abs(estimate.mean - 0.5) < 4 * estimate.std_error


def test_estimators_share_their_expectation():
    lattice = build_box(2, 3)
    batch = draw_samples(lattice, SamplerKind.CFTP, 4000, seed=2)
    spin_mean, spin_error = mean_and_std_error(batch.observable(EstimatorKind.SPIN_AVERAGE))
    link_mean, link_error = mean_and_std_error(batch.observable(EstimatorKind.CONNECTIVITY))
    assert abs(spin_mean - link_mean) < 4 * np.hypot(spin_error, link_error)
    assert abs(link_mean - 5 / 11) < 4 * link_error
    spin_variance = np.var(batch.observable(EstimatorKind.SPIN_AVERAGE))
    link_variance = np.var(batch.observable(EstimatorKind.CONNECTIVITY))
    assert link_variance <= spin_variance


def test_draws_do_not_depend_on_the_worker_count():
    lattice = build_box(2, 5)
    serial = draw_samples(lattice, SamplerKind.CFTP, 40, seed=3, workers=1, keep_configs=True)
    parallel = draw_samples(lattice, SamplerKind.CFTP, 40, seed=3, workers=3, keep_configs=True)
    assert serial.configs == parallel.configs
    assert np.array_equal(serial.origin_spins, parallel.origin_spins)


def test_forward_sampler_counts_its_rejections():
    lattice = build_box(2, 5)
    estimate = estimate_magnetization(lattice, SamplerKind.FORWARD, n_samples=30, seed=4, horizon=100)
    assert estimate.samples_accepted == 30
    assert estimate.samples_wasted > 0
    assert 0 < estimate.waste_rate < 1


def test_waste_report():
    lattice = build_box(2, 5)
    short = waste_report(lattice, 10, 50, seed=5)
    assert short.rejected == 50
    assert short.rate == 1.0
    long = waste_report(lattice, None, 50, seed=5)
    assert long.horizon == 625
    assert long.rate < short.rate


def test_forward_acceptance_grows_with_the_horizon():
    lattice = build_box(2, 5)
    horizons = [lattice.site_count, lattice.site_count ** 2, 2 * lattice.site_count ** 2]
    rates = [waste_report(lattice, horizon, 400, seed=5).rate for horizon in horizons]
    assert rates[0] == 1.0
    assert rates[1] < 0.1
    assert rates[2] <= rates[1]


def test_forward_waste_on_a_small_square():
    report = waste_report(build_box(2, 3), 81, 1000, seed=8)
    assert report.attempts == 1000
    assert report.rate < 0.10


def test_sweep_in_two_dimensions_fits_the_means():
    result = sweep(2, [1, 3], SamplerKind.CFTP, 500, seed=6)
    assert result.sides == [1, 3]
    assert result.fit is not None
    assert len(result.means) == 2


def test_sweep_in_three_dimensions_has_no_fit():
    result = sweep(3, [1, 3], SamplerKind.CFTP, 200, seed=6)
    assert result.fit is None
    assert all(mean > 0 for mean in result.means)


def test_estimate_rows():
    result = sweep(2, [1], SamplerKind.CFTP, 10, seed=7)
    rows = estimate_rows(result.estimates, timing=False)
    assert rows[0] == ",".join(CSV_HEADER)
    fields = rows[1].split(",")
    assert fields[:5] == ["2", "1", "spin-average", "cftp", "10"]
    assert fields[7] == ""
    assert fields[-1] == "0"


@pytest.mark.slow
def test_forward_waste_rate_at_the_default_horizon():
    for side in (3, 5, 9, 13):
        report = waste_report(build_box(2, side), None, 1000, seed=8)
        assert report.rate < 0.10


@pytest.mark.slow
def test_two_dimensional_magnetization_vanishes():
    result = sweep(2, [3, 5, 7, 9, 11, 13], SamplerKind.CFTP, 10000, seed=9, workers=4)
    first, last = result.estimates[0], result.estimates[-1]
    assert intervals_disjoint(first.mean, first.std_error, last.mean, last.std_error)
    assert first.mean > last.mean
    assert result.fit.slope < 0
    assert result.fit.r_squared > 0.9


@pytest.mark.slow
def test_three_dimensional_magnetization_stays_positive():
    result = sweep(3, [3, 5, 7, 9], SamplerKind.CFTP, 10000, seed=10, workers=4)
    side7, side9 = result.estimates[-2], result.estimates[-1]
    assert lower_confidence_bound(side9.mean, side9.std_error, 0.99) > 0.05
    assert abs(side7.mean - side9.mean) < 3 * np.hypot(side7.std_error, side9.std_error)
