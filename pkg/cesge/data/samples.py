from __future__ import annotations

import logging

import numpy as np

from .models import SAMPLE_INSUFFICIENT, SAMPLE_OK, LinkedObservation, RegressionSample

log = logging.getLogger(__name__)

MIN_OBSERVATIONS = 3


def build_regression_samples(
        obs: LinkedObservation,
        exclude_diagonal: bool = False,
        min_obs: int = MIN_OBSERVATIONS,
) -> list[RegressionSample]:
        """Stellt je Sektor die Paare (Δ ln a_ij, ln p_i/p_j) zusammen.

        Es gehen nur Faktoren ein, deren Anteil in beiden Perioden strikt positiv
        ist; Zeilen bleiben nach Faktorindex geordnet (0 = Primärfaktor).
        """

        shares0 = obs.table0.shares()
        shares1 = obs.table1.shares()
        log_p = np.log(obs.deflators.p)
        samples: list[RegressionSample] = []
        for j in range(obs.n):
                mask = (shares0[:, j] > 0) & (shares1[:, j] > 0)
                if exclude_diagonal:
                        mask[j + 1] = False
                factors = np.flatnonzero(mask)
                y = np.log(shares1[factors, j]) - np.log(shares0[factors, j])
                x = log_p[factors] - log_p[j + 1]
                flag = SAMPLE_OK if len(factors) >= min_obs else SAMPLE_INSUFFICIENT
                if flag != SAMPLE_OK:
                        log.warning(
                                'Sektor %s (%s): nur %s Beobachtungen, wird nicht geschätzt',
                                j + 1,
                                obs.labels[j],
                                len(factors),
                        )
                samples.append(
                        RegressionSample(
                                sector=j,
                                factors=factors,
                                y=y,
                                x=x,
                                label=obs.labels[j],
                                flag=flag,
                        )
                )
        return samples
