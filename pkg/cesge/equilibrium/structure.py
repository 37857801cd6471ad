from __future__ import annotations

import logging
from typing import Iterable, Optional

import numpy as np
from scipy import stats

from cesge.data.models import Economy

from .prices import EquilibriumError, gross_output, leontief_inverse, solve_row

log = logging.getLogger(__name__)

IDENTITY_RTOL = 1e-6
IDENTITY_ATOL = 1e-9


class ConsistencyFailure(EquilibriumError):
        """SCS-Identität (1 − π)·d = Σ(v − v′) verletzt."""


class DegenerateDistribution(ValueError):
        """Verteilung ohne Streuung oder mit weniger als zwei Werten."""


def projected_shares(economy: Economy, z: np.ndarray, pi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Kostenanteile nach dem Schock: b_ij = a_ij · (z_j π_j / π_i)^(−γ_j), π_0 = 1."""

        pi = np.asarray(pi, dtype=float)
        if not np.all(pi > 0):
                raise ValueError('Preise müssen positiv sein')
        gamma = np.where(economy.zero_gamma_mask(), 0.0, economy.gamma)
        ln_cost = np.log(np.asarray(z, dtype=float)) + np.log(pi)
        ln_pi = np.log(pi)
        b0 = economy.a0 * np.exp(-gamma * ln_cost)
        B = economy.A * np.exp(-gamma[None, :] * (ln_cost[None, :] - ln_pi[:, None]))
        return b0, B


def value_added_current(economy: Economy) -> np.ndarray:
        """v = a0 · [I − A]⁻¹ · ⟨d⟩."""

        return solve_row(np.eye(economy.n) - economy.A, economy.a0) * economy.d


def value_added_projected(
        economy: Economy,
        z: np.ndarray,
        pi: np.ndarray,
        shares: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> np.ndarray:
        """v′ = b0 · [I − B]⁻¹ · ⟨π⟩ · ⟨d⟩ mit den projizierten Anteilen."""

        b0, B = shares if shares is not None else projected_shares(economy, z, pi)
        return solve_row(np.eye(economy.n) - B, b0) * np.asarray(pi, dtype=float) * economy.d


def value_added_uniform(economy: Economy, z: np.ndarray, pi: np.ndarray, gamma: float) -> np.ndarray:
        """v′ = a0 · [⟨z^γ⟩ − A]⁻¹ · ⟨π^(1−γ)⟩ · ⟨d⟩ für einheitliches γ.

        γ = 0 ergibt a0[I − A]⁻¹⟨π⟩⟨d⟩ (Cobb-Douglas-Preise einsetzen),
        γ = 1 ergibt a0[⟨z⟩ − A]⁻¹⟨d⟩.
        """

        z = np.asarray(z, dtype=float)
        pi = np.asarray(pi, dtype=float)
        weights = solve_row(np.diag(np.power(z, gamma)) - economy.A, economy.a0)
        return weights * np.power(pi, 1.0 - gamma) * economy.d


def scs(
        economy: Economy,
        pi: np.ndarray,
        v: np.ndarray,
        v_prime: np.ndarray,
        strict: bool = True,
) -> tuple[float, np.ndarray, float]:
        """Eingesparte gesellschaftliche Kosten: (1 − π)·d gesamt und v − v′ je Sektor.

        Rückgabe (Summe, Verteilung, Identitätslücke). Mit ``strict`` führt eine
        verletzte Identität zu ``ConsistencyFailure``, sonst zu einer Warnung.
        """

        total = float((1.0 - np.asarray(pi, dtype=float)) @ economy.d)
        dist = np.asarray(v, dtype=float) - np.asarray(v_prime, dtype=float)
        gap = abs(float(dist.sum()) - total)
        if gap > IDENTITY_RTOL * abs(total) + IDENTITY_ATOL:
                message = f'Σ(v − v′) = {dist.sum():.12g}, (1 − π)·d = {total:.12g}'
                if strict:
                        raise ConsistencyFailure(message)
                log.warning('SCS-Identität verletzt: %s', message)
        return total, dist, gap


def kurtosis(values: Iterable[float]) -> float:
        """Nicht-exzessive Kurtosis m₄/m₂² mit 1/n-Momenten."""

        data = np.asarray(list(values), dtype=float)
        if len(data) < 2:
                raise DegenerateDistribution('mindestens zwei Werte nötig')
        if np.var(data) == 0.0:
                raise DegenerateDistribution('Varianz null')
        return float(stats.kurtosis(data, fisher=False, bias=True))


def leontief_shock_identity(economy: Economy, sector: int, factor: float) -> float:
        """SCS eines Einzelschocks unter Leontief: (z−1)·x_k / (1 + (z−1)·ℓ_kk)."""

        x = gross_output(economy)
        ell = leontief_inverse(economy.A)[sector, sector]
        step = factor - 1.0
        return float(step * x[sector] / (1.0 + step * ell))
