from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np
from scipy import stats

from cesge.data.models import (
        STATUS_NULL,
        STATUS_OK,
        RegressionSample,
        SectorEstimate,
)

log = logging.getLogger(__name__)

STAR_LEVELS = ((0.01, '***'), (0.05, '**'), (0.1, '*'))
MIN_OBSERVATIONS = 3


class EstimationError(RuntimeError):
        """Fehler bei der Schätzung eines Sektors."""


class DegenerateSample(EstimationError):
        """Stichprobe ohne Streuung in x oder mit weniger als drei Beobachtungen."""


class OLSFit(NamedTuple):
        slope: float
        intercept: float
        se_slope: float
        se_intercept: float
        p_slope: float
        p_intercept: float


def significance_stars(p_value: float) -> str:
        if not math.isfinite(p_value):
                return ''
        for level, stars in STAR_LEVELS:
                if p_value < level:
                        return stars
        return ''


def two_sided_p(coefficient: float, se: float, df: int) -> float:
        if not math.isfinite(se) or se == 0.0:
                # exakte Anpassung
                return 0.0 if coefficient != 0.0 else 1.0
        return float(2.0 * stats.t.sf(abs(coefficient / se), df))


def _check_estimable(x: np.ndarray) -> None:
        if len(x) < MIN_OBSERVATIONS:
                raise DegenerateSample(f'{len(x)} Beobachtungen, mindestens {MIN_OBSERVATIONS} nötig')
        scale = max(1.0, float(np.max(np.abs(x))))
        if float(np.ptp(x)) <= 1e-14 * scale:
                raise DegenerateSample('x ohne Streuung')


def _hc1_errors(x: np.ndarray, y: np.ndarray, slope: float, intercept: float) -> tuple[float, float]:
        n = len(x)
        design = np.column_stack([np.ones(n), x])
        residuals = y - (intercept + slope * x)
        bread = np.linalg.inv(design.T @ design)
        meat = design.T @ (design * (residuals ** 2)[:, None])
        covariance = n / (n - 2) * bread @ meat @ bread
        return float(np.sqrt(covariance[1, 1])), float(np.sqrt(covariance[0, 0]))


def ols_fit(sample: RegressionSample, robust: bool = False) -> OLSFit:
        """Kleinste Quadrate mit Achsenabschnitt; P-Werte aus der t-Verteilung (n−2 FG)."""

        x, y = sample.x, sample.y
        _check_estimable(x)
        result = stats.linregress(x, y)
        slope, intercept = float(result.slope), float(result.intercept)
        if robust:
                se_slope, se_intercept = _hc1_errors(x, y, slope, intercept)
        else:
                se_slope, se_intercept = float(result.stderr), float(result.intercept_stderr)
        df = len(x) - 2
        return OLSFit(
                slope=slope,
                intercept=intercept,
                se_slope=se_slope,
                se_intercept=se_intercept,
                p_slope=two_sided_p(slope, se_slope, df),
                p_intercept=two_sided_p(intercept, se_intercept, df),
        )


def estimate_sector(sample: RegressionSample, alpha: float = 0.1, robust: bool = False) -> SectorEstimate:
        """Schätzt γ und TFPg; bei insignifikanter Steigung gilt Cobb-Douglas (σ = 1)."""

        fit = ols_fit(sample, robust=robust)
        accepted_null = not fit.p_slope < alpha
        if accepted_null:
                gamma, tfpg = 0.0, math.nan
        else:
                gamma = fit.slope
                tfpg = -fit.intercept / fit.slope if fit.slope != 0.0 else math.nan
        log.debug('Sektor %s: γ=%.6g p=%.3g null=%s', sample.sector + 1, fit.slope, fit.p_slope, accepted_null)
        return SectorEstimate(
                sector=sample.sector,
                label=sample.label,
                status=STATUS_NULL if accepted_null else STATUS_OK,
                slope=fit.slope,
                gamma=gamma,
                sigma=1.0 - gamma,
                intercept=fit.intercept,
                tfpg=tfpg,
                se_slope=fit.se_slope,
                se_intercept=fit.se_intercept,
                p_slope=fit.p_slope,
                p_intercept=fit.p_intercept,
                stars_slope=significance_stars(fit.p_slope),
                stars_intercept=significance_stars(fit.p_intercept),
                n_obs=sample.n_obs,
                accepted_null=accepted_null,
        )
