from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from cesge.data.models import IOTable, SectorEstimate

MODE_SIGNIFICANT = 'significant-only'
MODE_ALL = 'all'


@dataclass(frozen=True, eq=False)
class ShareParameters:
        """CES-Anteilsparameter λ; bei Einheitspreisen gleich den Kostenanteilen."""

        lambda0: np.ndarray
        Lambda: np.ndarray

        def shares(self) -> np.ndarray:
                return np.vstack([self.lambda0, self.Lambda])


@dataclass(frozen=True)
class ElasticitySummary:
        mode: str
        mean_sigma: float
        n_significant: int
        n_sectors: int

        def to_dict(self) -> dict:
                return {
                        'mode': self.mode,
                        'mean_sigma': self.mean_sigma,
                        'significant': self.n_significant,
                        'sectors': self.n_sectors,
                }


def calibrate_lambda(table: IOTable, estimates: Optional[Sequence[SectorEstimate]] = None) -> ShareParameters:
        """λ_ij = a_ij unter der Normierung aller aktuellen Preise auf eins.

        Die Schätzungen gehen nicht ein: bei π = 1 fällt der Term (z c / w)^(−γ)
        weg; das Argument hält die Signatur für andere Normierungen offen.
        """

        del estimates
        lambda0 = np.array(table.a0, dtype=float)
        Lambda = np.array(table.A, dtype=float)
        lambda0.setflags(write=False)
        Lambda.setflags(write=False)
        return ShareParameters(lambda0=lambda0, Lambda=Lambda)


def summarize_elasticities(estimates: Iterable[SectorEstimate], mode: str = MODE_SIGNIFICANT) -> ElasticitySummary:
        """Mittleres σ über alle Sektoren.

        ``significant-only``: Null-Sektoren zählen mit σ = 1;
        ``all``: jede Punktschätzung 1 − γ̂ (nicht schätzbare Sektoren mit σ = 1).
        """

        if mode not in (MODE_SIGNIFICANT, MODE_ALL):
                raise ValueError(f'unbekannter Modus: {mode}')
        rows = list(estimates)
        if not rows:
                raise ValueError('keine Schätzungen')
        sigmas = []
        for estimate in rows:
                if mode == MODE_SIGNIFICANT:
                        sigmas.append(1.0 if estimate.accepted_null else estimate.sigma)
                else:
                        sigmas.append(1.0 - estimate.raw_gamma())
        significant = sum(1 for estimate in rows if estimate.significant)
        mean_sigma = float(np.mean(sigmas)) if sigmas else math.nan
        return ElasticitySummary(mode=mode, mean_sigma=mean_sigma, n_significant=significant, n_sectors=len(rows))
