from __future__ import annotations

import logging
import math
from typing import Iterable

import numpy as np
from scipy import stats

from cesge.data.models import SHARE_TOLERANCE, AgreementReport, LinkedObservation

log = logging.getLogger(__name__)


class IndexNumberError(ValueError):
        """Ungültige Eingaben für den Törnqvist-Index."""


class AgreementError(ValueError):
        """Übereinstimmungsmaße nicht berechenbar (Länge oder Varianz)."""


def tornqvist_tfpg(
        a0_col: Iterable[float],
        a1_col: Iterable[float],
        deflators: Iterable[float],
        p_out: float,
) -> float:
        """Log-Törnqvist-TFPg: −ln p_out + Σ ½(a⁰_i + a¹_i)·ln p_i."""

        shares0 = np.asarray(list(a0_col), dtype=float)
        shares1 = np.asarray(list(a1_col), dtype=float)
        prices = np.asarray(list(deflators), dtype=float)
        if not (shares0.shape == shares1.shape == prices.shape):
                raise IndexNumberError('Anteile und Deflatoren müssen gleich lang sein')
        for name, shares in (('Periode 0', shares0), ('Periode 1', shares1)):
                total = float(shares.sum())
                if abs(total - 1.0) > SHARE_TOLERANCE:
                        raise IndexNumberError(f'{name}: Anteile summieren zu {total:.12g}')
        mean_shares = 0.5 * (shares0 + shares1)
        used = mean_shares > 0
        if not p_out > 0 or np.any(prices[used] <= 0):
                raise IndexNumberError('Deflatoren müssen positiv sein')
        return float(-math.log(p_out) + np.sum(mean_shares[used] * np.log(prices[used])))


def tornqvist_by_sector(obs: LinkedObservation) -> np.ndarray:
        shares0 = obs.table0.shares()
        shares1 = obs.table1.shares()
        prices = obs.deflators.p
        return np.array([
                tornqvist_tfpg(shares0[:, j], shares1[:, j], prices, prices[j + 1])
                for j in range(obs.n)
        ])


def lin_ccc(x: np.ndarray, y: np.ndarray, ddof: int = 0) -> float:
        """Lins Konkordanzkoeffizient; ddof=0 entspricht Lins 1/n-Momenten."""

        covariance = np.cov(x, y, ddof=ddof)[0, 1]
        var_x, var_y = np.var(x, ddof=ddof), np.var(y, ddof=ddof)
        return float(2.0 * covariance / (var_x + var_y + (np.mean(x) - np.mean(y)) ** 2))


def agreement(
        x: Iterable[float],
        y: Iterable[float],
        subset: str = '',
        ddof: int = 0,
) -> AgreementReport:
        x_values = np.asarray(list(x), dtype=float)
        y_values = np.asarray(list(y), dtype=float)
        if x_values.shape != y_values.shape:
                raise AgreementError(f'Längen verschieden: {len(x_values)} vs {len(y_values)}')
        if len(x_values) < 2:
                raise AgreementError('mindestens zwei Beobachtungen nötig')
        if np.var(x_values) == 0 or np.var(y_values) == 0:
                raise AgreementError('Varianz null')
        pearson, _ = stats.pearsonr(x_values, y_values)
        return AgreementReport(
                subset=subset,
                pearson=float(pearson),
                lin_ccc=lin_ccc(x_values, y_values, ddof=ddof),
                n=len(x_values),
        )
