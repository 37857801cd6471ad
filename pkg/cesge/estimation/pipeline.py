from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import joblib as jbl
import pandas as pd

from cesge.data.models import (
        ESTIMATE_COLUMNS,
        STATUS_DEGENERATE,
        STATUS_INSUFFICIENT,
        STATUS_NULL,
        STATUS_OK,
        AgreementReport,
        LinkedObservation,
        RegressionSample,
        SectorEstimate,
)
from cesge.data.samples import build_regression_samples

from .bootstrap import DEFAULT_REPS, BootstrapUnstable, bootstrap_tfpg
from .indexes import AgreementError, agreement, tornqvist_by_sector
from .ols import DegenerateSample, EstimationError, estimate_sector

log = logging.getLogger(__name__)

SUBSET_SLOPE = 'slope'
SUBSET_SLOPE_ONLY = 'slope-only'
SUBSET_SLOPE_AND_CONSTANT = 'slope-and-constant'
SUBSET_BOOTSTRAP = 'bootstrap'
SUBSETS = (SUBSET_SLOPE, SUBSET_SLOPE_ONLY, SUBSET_SLOPE_AND_CONSTANT, SUBSET_BOOTSTRAP)


class NoEstimableSectors(EstimationError):
        """Kein Sektor mit schätzbarer Stichprobe."""


@dataclass
class EstimationRun:
        """Schätzergebnisse einer verknüpften Beobachtung."""

        estimates: list[SectorEstimate]
        agreements: list[AgreementReport] = field(default_factory=list)
        alpha: float = field(default=0.1)

        @property
        def estimable(self) -> list[SectorEstimate]:
                return [estimate for estimate in self.estimates if estimate.status in (STATUS_OK, STATUS_NULL)]

        def require_estimable(self) -> EstimationRun:
                if not self.estimable:
                        raise NoEstimableSectors(f'keiner von {len(self.estimates)} Sektoren schätzbar')
                return self

        def estimates_frame(self) -> pd.DataFrame:
                return pd.DataFrame([estimate.to_dict() for estimate in self.estimates], columns=ESTIMATE_COLUMNS)

        def agreement_frame(self) -> pd.DataFrame:
                return pd.DataFrame(
                        [report.to_dict() for report in self.agreements],
                        columns=['subset', 'concordance', 'correlation', 'obs'],
                )


def _unestimated(sample: RegressionSample, status: str) -> SectorEstimate:
        return SectorEstimate(sector=sample.sector, label=sample.label, status=status, n_obs=sample.n_obs)


def estimate_one(
        sample: RegressionSample,
        alpha: float = 0.1,
        robust: bool = False,
        reps: int = DEFAULT_REPS,
        seed: int = 0,
        scheme: str = 'pairs',
) -> SectorEstimate:
        """Schätzung plus Bootstrap für einen Sektor; Seed je Sektor ``seed ^ sector``."""

        if not sample.estimable:
                return _unestimated(sample, STATUS_INSUFFICIENT)
        try:
                estimate = estimate_sector(sample, alpha=alpha, robust=robust)
        except DegenerateSample as exc:
                log.warning('Sektor %s (%s): %s', sample.sector + 1, sample.label, exc)
                return _unestimated(sample, STATUS_DEGENERATE)
        if estimate.accepted_null or reps < 1:
                return estimate
        try:
                result = bootstrap_tfpg(sample, reps=reps, seed=seed ^ sample.sector, scheme=scheme)
        except BootstrapUnstable as exc:
                log.warning('Bootstrap abgebrochen: %s', exc)
                return estimate
        return estimate.copy(boot_p=result.boot_p, ci_lo=result.ci_lo, ci_hi=result.ci_hi)


def _subset_filters(alpha: float) -> dict[str, Callable[[SectorEstimate], bool]]:
        def intercept_significant(estimate: SectorEstimate) -> bool:
                return estimate.p_intercept < alpha

        return {
                SUBSET_SLOPE: lambda estimate: True,
                SUBSET_SLOPE_ONLY: lambda estimate: not intercept_significant(estimate),
                SUBSET_SLOPE_AND_CONSTANT: intercept_significant,
                SUBSET_BOOTSTRAP: lambda estimate: estimate.boot_p < alpha,
        }


def agreement_table(estimates: list[SectorEstimate], alpha: float = 0.1) -> list[AgreementReport]:
        """Konkordanz und Korrelation zwischen CES- und Translog-TFPg je Teilmenge.

        Grundmenge sind Sektoren mit signifikanter Steigung und definierter TFPg;
        Teilmengen mit weniger als zwei Sektoren oder ohne Varianz ergeben NaN.
        """

        base = [
                estimate for estimate in estimates
                if estimate.tfpg_defined and math.isfinite(estimate.tfpg_translog)
        ]
        reports: list[AgreementReport] = []
        for subset, keep in _subset_filters(alpha).items():
                chosen = [estimate for estimate in base if keep(estimate)]
                try:
                        reports.append(agreement(
                                [estimate.tfpg for estimate in chosen],
                                [estimate.tfpg_translog for estimate in chosen],
                                subset=subset,
                        ))
                except AgreementError as exc:
                        log.warning('Teilmenge %s: %s (%s Sektoren)', subset, exc, len(chosen))
                        reports.append(AgreementReport(subset=subset, pearson=math.nan, lin_ccc=math.nan, n=len(chosen)))
        return reports


def estimate_observation(
        obs: LinkedObservation,
        alpha: float = 0.1,
        reps: int = DEFAULT_REPS,
        seed: int = 0,
        scheme: str = 'pairs',
        robust: bool = False,
        exclude_diagonal: bool = False,
        jobs: int = 1,
        samples: Optional[list[RegressionSample]] = None,
) -> EstimationRun:
        """Vollständige Schätzung: Stichproben, OLS, Bootstrap, Törnqvist, Übereinstimmung."""

        if samples is None:
                samples = build_regression_samples(obs, exclude_diagonal=exclude_diagonal)
        estimates = jbl.Parallel(n_jobs=jobs)(
                jbl.delayed(estimate_one)(sample, alpha, robust, reps, seed, scheme)
                for sample in samples
        )
        translog = tornqvist_by_sector(obs)
        estimates = [
                estimate.copy(tfpg_translog=float(value))
                for estimate, value in zip(estimates, translog)
        ]
        counts = {status: 0 for status in (STATUS_OK, STATUS_NULL, STATUS_INSUFFICIENT, STATUS_DEGENERATE)}
        for estimate in estimates:
                counts[estimate.status] += 1
        log.info(
                '%s Sektoren geschätzt: %s signifikant, %s Null, %s zu wenig Daten, %s degeneriert',
                len(estimates),
                counts[STATUS_OK],
                counts[STATUS_NULL],
                counts[STATUS_INSUFFICIENT],
                counts[STATUS_DEGENERATE],
        )
        return EstimationRun(estimates=estimates, agreements=agreement_table(estimates, alpha), alpha=alpha)
