from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from cesge.data.models import GAMMA_ZERO, Economy, IOTable

from .prices import EquilibriumError, solve_prices_closed_form, solve_prices_cobb_douglas, solve_prices_fixed_point
from .structure import IDENTITY_ATOL, IDENTITY_RTOL, value_added_current, value_added_projected, value_added_uniform

log = logging.getLogger(__name__)

SIGN_TOLERANCE = 1e-9
PRICE_TOLERANCE = 1e-12
DIRECTION_UP = 'up'
DIRECTION_DOWN = 'down'
DIRECTION_NONE = 'none'
WITNESS_SOLVERS = ('fixed-point', 'paper-closed-form')


class PreconditionError(ValueError):
        """Voraussetzungen des Vorzeichensatzes nicht erfüllt."""


@dataclass
class PropositionResult:
        """Vorzeichenprüfung von v − v′ für einheitliches γ."""

        gamma: float
        direction: str
        holds: bool
        worst_sector: int
        worst_value: float
        price_order_holds: bool
        scs_dist: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

        def to_dict(self) -> dict:
                return {
                        'gamma': self.gamma,
                        'direction': self.direction,
                        'holds': self.holds,
                        'worst_sector': self.worst_sector + 1,
                        'worst_value': self.worst_value,
                        'price_order_holds': self.price_order_holds,
                }


@dataclass
class SignWitness:
        """Sektor mit negativem SCS unter heterogenen Elastizitäten."""

        trial: int
        solver: str
        shocked_sector: int
        sector: int
        scs: float
        sigma: float
        identity_gap: float = 0.0
        consistent: bool = True

        def to_dict(self) -> dict:
                return {
                        'trial': self.trial,
                        'solver': self.solver,
                        'shocked_sector': self.shocked_sector + 1,
                        'sector': self.sector + 1,
                        'scs': self.scs,
                        'sigma': self.sigma,
                        'identity_gap': self.identity_gap,
                        'consistent': self.consistent,
                }


def shock_direction(z: np.ndarray) -> str:
        if np.all(z == 1.0):
                return DIRECTION_NONE
        if np.all(z >= 1.0):
                return DIRECTION_UP
        if np.all(z <= 1.0):
                return DIRECTION_DOWN
        raise PreconditionError('z muss elementweise ≥ 1 oder ≤ 1 sein')


def proposition_check(economy: Economy, z: np.ndarray) -> PropositionResult:
        """Prüft v − v′ ≥ 0 (z ≥ 1) bzw. ≤ 0 (z ≤ 1) und π ≤ π^(1−γ) ≤ 1 (bzw. umgekehrt)."""

        z = np.asarray(z, dtype=float)
        gamma = economy.uniform_gamma()
        if gamma is None:
                raise PreconditionError('einheitliches γ erforderlich')
        if not -GAMMA_ZERO < gamma <= 1.0 + GAMMA_ZERO:
                raise PreconditionError(f'γ = {gamma} außerhalb [0, 1]')
        if np.any(economy.d < 0):
                raise PreconditionError('Endnachfrage muss nichtnegativ sein')
        direction = shock_direction(z)

        if abs(gamma) < GAMMA_ZERO:
                gamma = 0.0
                pi = solve_prices_cobb_douglas(economy, z).pi
        else:
                pi = solve_prices_closed_form(economy, z).pi
        dist = value_added_current(economy) - value_added_uniform(economy, z, pi, gamma)

        scaled = np.power(pi, 1.0 - gamma)
        if direction == DIRECTION_DOWN:
                worst = int(np.argmax(dist))
                holds = bool(dist[worst] <= SIGN_TOLERANCE)
                order = np.all(pi >= scaled - PRICE_TOLERANCE) and np.all(scaled >= 1.0 - PRICE_TOLERANCE)
        else:
                worst = int(np.argmin(dist))
                holds = bool(dist[worst] >= -SIGN_TOLERANCE)
                if direction == DIRECTION_NONE:
                        holds = holds and bool(np.all(np.abs(dist) <= SIGN_TOLERANCE))
                order = np.all(pi <= scaled + PRICE_TOLERANCE) and np.all(scaled <= 1.0 + PRICE_TOLERANCE)
        return PropositionResult(
                gamma=gamma,
                direction=direction,
                holds=holds,
                worst_sector=worst,
                worst_value=float(dist[worst]),
                price_order_holds=bool(order),
                scs_dist=dist,
        )


def proposition_sweep(table: IOTable, grid: Iterable[float], shocks: Sequence[np.ndarray]) -> list[PropositionResult]:
        results = []
        for gamma in grid:
                economy = Economy.uniform(table, gamma)
                for z in shocks:
                        result = proposition_check(economy, z)
                        if not result.holds:
                                log.warning('γ=%s: Vorzeichensatz verletzt in Sektor %s (%.3g)', gamma, result.worst_sector + 1, result.worst_value)
                        results.append(result)
        return results


def _witness_values(economy: Economy, z: np.ndarray, solver: str) -> tuple[np.ndarray, float, bool]:
        """v − v′ je Sektor samt Lücke der SCS-Identität; nur identitätstreue Preise sind ein Gleichgewicht."""

        if solver == 'fixed-point':
                pi = solve_prices_fixed_point(economy, z).pi
        else:
                pi = solve_prices_closed_form(economy, z).pi
        dist = value_added_current(economy) - value_added_projected(economy, z, pi)
        total = float((1.0 - pi) @ economy.d)
        gap = abs(float(dist.sum()) - total)
        return dist, gap, gap <= IDENTITY_RTOL * abs(total) + IDENTITY_ATOL


def consistent_witnesses(witnesses: Iterable[SignWitness]) -> list[SignWitness]:
        return [witness for witness in witnesses if witness.consistent]


def search_sign_witnesses(
        table: IOTable,
        sigma_max: float = 2.0,
        trials: int = 200,
        seed: int = 0,
        factor: float = 2.0,
) -> list[SignWitness]:
        """Sucht Sektoren mit negativem SCS bei heterogenem σ ∈ [0, σ_max].

        Je Versuch wird ein zufälliger Sektor mit ``factor`` geschockt und mit
        beiden Lösern ausgewertet; negative Endnachfrage wird auf 0 gesetzt.
        Treffer aus Preisen, die die SCS-Identität verletzen, tragen
        ``consistent=False`` und sind kein Gegenbeispiel im Gleichgewicht.
        """

        rng = np.random.default_rng(seed)
        base = table.copy(d=np.clip(table.d, 0.0, None))
        witnesses: list[SignWitness] = []
        up = factor >= 1.0
        for trial in range(trials):
                sigma = rng.uniform(0.0, sigma_max, size=base.n)
                gamma = 1.0 - sigma
                gamma = np.where(np.abs(gamma) < 1e-6, 1e-6, gamma)
                economy = Economy(table=base, gamma=gamma)
                sector = int(rng.integers(0, base.n))
                z = np.ones(base.n)
                z[sector] = factor
                for solver in WITNESS_SOLVERS:
                        try:
                                dist, gap, consistent = _witness_values(economy, z, solver)
                        except EquilibriumError as exc:
                                log.debug('Versuch %s (%s): %s', trial, solver, exc)
                                continue
                        violating = np.flatnonzero(dist < -SIGN_TOLERANCE) if up else np.flatnonzero(dist > SIGN_TOLERANCE)
                        witnesses.extend(
                                SignWitness(
                                        trial=trial,
                                        solver=solver,
                                        shocked_sector=sector,
                                        sector=int(index),
                                        scs=float(dist[index]),
                                        sigma=float(sigma[index]),
                                        identity_gap=gap,
                                        consistent=consistent,
                                )
                                for index in violating
                        )
        found = len(consistent_witnesses(witnesses))
        log.info('%s Versuche, %s Gegenbeispiele im Gleichgewicht, %s ohne Identität', trials, found, len(witnesses) - found)
        return witnesses
