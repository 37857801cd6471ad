from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from cesge.data.models import RegressionSample

from .ols import EstimationError, ols_fit

log = logging.getLogger(__name__)

DEFAULT_REPS = 400
DEFAULT_LEVEL = 0.90
MIN_SLOPE = 1e-12
REDRAW_FACTOR = 10
SCHEMES = ('pairs', 'residual')


class BootstrapUnstable(EstimationError):
        """Zu viele degenerierte Bootstrap-Stichproben."""


class BootstrapResult(NamedTuple):
        boot_p: float
        ci_lo: float
        ci_hi: float


def _batch_fit(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Steigung und Achsenabschnitt je Zeile; dritte Rückgabe markiert x ohne Streuung."""

        x_mean = x.mean(axis=1, keepdims=True)
        y_mean = y.mean(axis=1, keepdims=True)
        dx = x - x_mean
        sxx = (dx * dx).sum(axis=1)
        sxy = (dx * (y - y_mean)).sum(axis=1)
        scale = np.maximum(1.0, np.abs(x).max(axis=1))
        flat = np.ptp(x, axis=1) <= 1e-14 * scale
        slope = np.divide(sxy, sxx, out=np.full_like(sxy, np.nan), where=~flat)
        intercept = y_mean[:, 0] - slope * x_mean[:, 0]
        return slope, intercept, flat


def sign_p_value(draws: np.ndarray) -> float:
        """Zweiseitiger P-Wert für H0: TFPg = 0 aus der Vorzeichenverteilung."""

        below = float(np.mean(draws <= 0.0))
        above = float(np.mean(draws >= 0.0))
        return float(np.clip(2.0 * min(below, above), 0.0, 1.0))


def bootstrap_tfpg(
        sample: RegressionSample,
        reps: int = DEFAULT_REPS,
        seed: int = 0,
        scheme: str = 'pairs',
        level: float = DEFAULT_LEVEL,
) -> BootstrapResult:
        """Bootstrap der TFPg-Schätzung −α/γ.

        ``pairs`` zieht Beobachtungspaare mit Zurücklegen, ``residual`` zieht
        Residuen um die angepasste Gerade. Degenerierte Ziehungen werden
        wiederholt, höchstens ``10 × reps`` Ziehungen insgesamt.
        """

        if scheme not in SCHEMES:
                raise ValueError(f'unbekanntes Bootstrap-Schema: {scheme}')
        if reps < 1:
                raise ValueError('reps muss mindestens 1 sein')
        rng = np.random.default_rng(seed)
        x, y = sample.x, sample.y
        n = len(x)
        if scheme == 'residual':
                fit = ols_fit(sample)
                fitted = fit.intercept + fit.slope * x
                residuals = y - fitted

        draws = np.empty(reps)
        filled = 0
        attempts = 0
        cap = REDRAW_FACTOR * reps
        while filled < reps:
                batch = reps - filled
                if attempts + batch > cap:
                        raise BootstrapUnstable(
                                f'Sektor {sample.sector + 1}: nur {filled} von {reps} Replikationen nach {attempts} Ziehungen'
                        )
                index = rng.integers(0, n, size=(batch, n))
                if scheme == 'pairs':
                        x_boot, y_boot = x[index], y[index]
                else:
                        x_boot = np.broadcast_to(x, (batch, n))
                        y_boot = fitted + residuals[index]
                attempts += batch
                slope, intercept, flat = _batch_fit(x_boot, y_boot)
                usable = ~flat & np.isfinite(slope) & (np.abs(slope) >= MIN_SLOPE)
                values = -intercept[usable] / slope[usable]
                draws[filled:filled + len(values)] = values
                filled += len(values)

        tail = 100.0 * (1.0 - level) / 2.0
        ci_lo, ci_hi = np.percentile(draws, [tail, 100.0 - tail])
        if attempts > reps:
                log.debug('Sektor %s: %s Ziehungen für %s Replikationen', sample.sector + 1, attempts, reps)
        return BootstrapResult(boot_p=sign_p_value(draws), ci_lo=float(ci_lo), ci_hi=float(ci_hi))
