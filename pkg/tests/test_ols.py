from __future__ import annotations

import math

import numpy as np
import pytest

from cesge.data.models import STATUS_NULL, STATUS_OK, RegressionSample
from cesge.estimation.bootstrap import BootstrapUnstable, bootstrap_tfpg, sign_p_value
from cesge.estimation.ols import DegenerateSample, estimate_sector, ols_fit, significance_stars

X = [0.1, 0.2, 0.4, 0.7]


def _noisy_sample(seed: int = 3, n: int = 12) -> RegressionSample:
        rng = np.random.default_rng(seed)
        x = rng.normal(size=n)
        y = 0.4 * x - 0.02 + rng.normal(scale=0.05 * (1.0 + np.abs(x)), size=n)
        return RegressionSample.from_xy(x, y, sector=2)


def test_exact_line_is_recovered():
        sample = RegressionSample.from_xy(X, [0.5 * x - 0.05 for x in X])
        estimate = estimate_sector(sample, alpha=0.1)
        assert estimate.status == STATUS_OK
        assert estimate.gamma == pytest.approx(0.5, abs=1e-12)
        assert estimate.sigma == pytest.approx(0.5, abs=1e-12)
        assert estimate.tfpg == pytest.approx(0.1, abs=1e-12)
        assert estimate.p_slope < 1e-10
        assert estimate.stars_slope == '***'
        assert estimate.n_obs == 4


def test_insignificant_slope_falls_back_to_cobb_douglas():
        sample = RegressionSample.from_xy([-1, 0, 1, -1, 0, 1], [0.1, -0.2, 0.1, -0.1, 0.2, -0.1])
        estimate = estimate_sector(sample, alpha=0.1)
        assert estimate.slope == pytest.approx(0.0, abs=1e-12)
        assert estimate.accepted_null
        assert estimate.status == STATUS_NULL
        assert estimate.gamma == 0.0
        assert estimate.sigma == 1.0
        assert math.isnan(estimate.tfpg)
        assert not estimate.tfpg_defined


def test_matches_normal_equations():
        sample = _noisy_sample()
        fit = ols_fit(sample)
        design = np.column_stack([np.ones(sample.n_obs), sample.x])
        beta = np.linalg.solve(design.T @ design, design.T @ sample.y)
        residuals = sample.y - design @ beta
        s2 = residuals @ residuals / (sample.n_obs - 2)
        covariance = s2 * np.linalg.inv(design.T @ design)
        assert fit.intercept == pytest.approx(beta[0], abs=1e-12)
        assert fit.slope == pytest.approx(beta[1], abs=1e-12)
        assert fit.se_intercept == pytest.approx(math.sqrt(covariance[0, 0]), rel=1e-9)
        assert fit.se_slope == pytest.approx(math.sqrt(covariance[1, 1]), rel=1e-9)


def test_shifting_y_moves_only_the_intercept():
        sample = _noisy_sample()
        shifted = RegressionSample.from_xy(sample.x, sample.y + 0.3)
        fit, fit_shifted = ols_fit(sample), ols_fit(shifted)
        assert fit_shifted.slope == pytest.approx(fit.slope, abs=1e-12)
        assert fit_shifted.intercept == pytest.approx(fit.intercept + 0.3, abs=1e-12)
        assert fit_shifted.se_slope == pytest.approx(fit.se_slope, rel=1e-9)


def test_robust_errors_keep_point_estimates():
        sample = _noisy_sample()
        classical, robust = ols_fit(sample), ols_fit(sample, robust=True)
        assert robust.slope == classical.slope
        assert robust.intercept == classical.intercept
        assert robust.se_slope > 0.0
        assert robust.se_slope != pytest.approx(classical.se_slope, rel=1e-6)


@pytest.mark.parametrize('x', [[0.3, 0.3, 0.3, 0.3], [0.1, 0.2]])
def test_degenerate_samples(x):
        with pytest.raises(DegenerateSample):
                ols_fit(RegressionSample.from_xy(x, [0.0] * len(x)))


@pytest.mark.parametrize('p_value, stars', [
        (0.005, '***'),
        (0.01, '**'),
        (0.049, '**'),
        (0.05, '*'),
        (0.1, ''),
        (float('nan'), ''),
])
def test_significance_stars(p_value, stars):
        assert significance_stars(p_value) == stars


def test_bootstrap_of_exact_line_has_zero_width():
        sample = RegressionSample.from_xy(X, [0.5 * x - 0.05 for x in X])
        result = bootstrap_tfpg(sample, reps=200, seed=1)
        assert result.ci_lo == pytest.approx(0.1, abs=1e-10)
        assert result.ci_hi == pytest.approx(0.1, abs=1e-10)
        assert result.boot_p == 0.0


def test_bootstrap_is_deterministic_for_a_seed():
        sample = _noisy_sample()
        first = bootstrap_tfpg(sample, reps=300, seed=7)
        assert bootstrap_tfpg(sample, reps=300, seed=7) == first
        assert bootstrap_tfpg(sample, reps=300, seed=8) != first
        assert first.ci_lo <= first.ci_hi


def test_residual_scheme():
        sample = _noisy_sample(n=20)
        result = bootstrap_tfpg(sample, reps=300, seed=2, scheme='residual')
        assert 0.0 <= result.boot_p <= 1.0
        assert result.ci_lo < result.ci_hi
        with pytest.raises(ValueError):
                bootstrap_tfpg(sample, reps=10, scheme='wild')


def test_flat_response_is_unstable():
        sample = RegressionSample.from_xy([0.1, 0.2, 0.3, 0.4, 0.5], [0.5] * 5)
        with pytest.raises(BootstrapUnstable):
                bootstrap_tfpg(sample, reps=50, seed=0)


def test_sign_p_value():
        assert sign_p_value(np.array([0.1, 0.2, 0.3])) == 0.0
        assert sign_p_value(np.array([-1.0, 1.0, 2.0, 3.0])) == pytest.approx(0.5)
        assert sign_p_value(np.array([0.0, 0.0])) == 1.0


@pytest.mark.slow
def test_bootstrap_interval_coverage():
        covered = 0
        for trial in range(100):
                rng = np.random.default_rng(trial)
                x = rng.uniform(-1.0, 1.0, size=100)
                y = 0.5 * x - 0.1 + rng.normal(scale=0.05, size=100)
                result = bootstrap_tfpg(RegressionSample.from_xy(x, y), reps=400, seed=trial)
                covered += result.ci_lo <= 0.2 <= result.ci_hi
        assert covered >= 85
