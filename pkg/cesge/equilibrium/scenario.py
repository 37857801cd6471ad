from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

import numpy as np

from cesge.data.models import Economy, IOTable, SectorEstimate, ShockResult
from cesge.utils.settings import (
        DEFAULT_DAMPING,
        DEFAULT_MAX_ITER,
        DEFAULT_TOL,
        ESTIMATE_METHODS,
        METHOD_CES,
        METHOD_CES_ALL,
        METHOD_COBB_DOUGLAS,
        METHOD_LEONTIEF,
        METHOD_PAPER_CLOSED_FORM,
)

from .prices import (
        gross_output,
        solve_prices_closed_form,
        solve_prices_cobb_douglas,
        solve_prices_fixed_point,
        solve_prices_leontief,
)
from .structure import DegenerateDistribution, kurtosis, projected_shares, scs, value_added_current, value_added_projected

log = logging.getLogger(__name__)

CLOSED_FORM_GAMMA_FLOOR = 1e-6
SOLVER_FIXED_POINT = 'fixed-point'
SOLVER_PAPER_CLOSED_FORM = 'paper-closed-form'
SOLVER_CLOSED_FORM = 'closed-form'


def gamma_for_method(method: str, n: int, estimates: Optional[Sequence[SectorEstimate]] = None) -> np.ndarray:
        """γ-Vektor je Methode.

        ``ces`` und ``ces-paper-closed-form`` verwenden nur signifikante Steigungen
        (Null-Sektoren γ = 0), ``ces-all`` jede Punktschätzung.
        """

        if method == METHOD_LEONTIEF:
                return np.ones(n)
        if method == METHOD_COBB_DOUGLAS:
                return np.zeros(n)
        if method not in ESTIMATE_METHODS:
                raise ValueError(f'unbekannte Methode: {method}')
        if not estimates:
                raise ValueError(f'Methode {method} benötigt Schätzungen')
        gamma = np.zeros(n)
        seen = set()
        for estimate in estimates:
                if not 0 <= estimate.sector < n:
                        raise ValueError(f'Schätzung für Sektor {estimate.sector + 1} außerhalb 1..{n}')
                seen.add(estimate.sector)
                if method == METHOD_CES_ALL:
                        gamma[estimate.sector] = estimate.raw_gamma()
                elif estimate.significant and math.isfinite(estimate.gamma):
                        gamma[estimate.sector] = estimate.gamma
        missing = n - len(seen)
        if missing:
                log.warning('%s Sektoren ohne Schätzung, γ = 0 angenommen', missing)
        return gamma


def build_economy(table: IOTable, method: str, estimates: Optional[Sequence[SectorEstimate]] = None) -> Economy:
        gamma = gamma_for_method(method, table.n, estimates)
        if method == METHOD_PAPER_CLOSED_FORM:
                zero = np.abs(gamma) < CLOSED_FORM_GAMMA_FLOOR
                if np.any(zero):
                        log.info('%s Sektoren mit γ = 0 für die Matrixformel auf %.0e gesetzt', int(zero.sum()), CLOSED_FORM_GAMMA_FLOOR)
                        gamma = np.where(zero, CLOSED_FORM_GAMMA_FLOOR, gamma)
        return Economy(table=table, gamma=gamma)


def run_shock(
        table: IOTable,
        z: np.ndarray,
        method: str,
        estimates: Optional[Sequence[SectorEstimate]] = None,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
        damping: float = DEFAULT_DAMPING,
) -> ShockResult:
        """Löst das Gleichgewicht nach einem Produktivitätsschock und bewertet SCS."""

        economy = build_economy(table, method, estimates)
        z = np.asarray(z, dtype=float)
        strict = True
        if method == METHOD_LEONTIEF:
                solution, solver = solve_prices_leontief(economy, z), SOLVER_CLOSED_FORM
        elif method == METHOD_COBB_DOUGLAS:
                solution, solver = solve_prices_cobb_douglas(economy, z), SOLVER_CLOSED_FORM
        elif method == METHOD_PAPER_CLOSED_FORM:
                solution = solve_prices_closed_form(economy, z)
                uniform = economy.uniform_gamma() is not None
                solver = SOLVER_CLOSED_FORM if uniform else SOLVER_PAPER_CLOSED_FORM
                strict = uniform
        else:
                solution = solve_prices_fixed_point(economy, z, tol=tol, max_iter=max_iter, damping=damping)
                solver = SOLVER_FIXED_POINT

        b0, B = projected_shares(economy, z, solution.pi)
        v = value_added_current(economy)
        v_prime = value_added_projected(economy, z, solution.pi, shares=(b0, B))
        total, dist, gap = scs(economy, solution.pi, v, v_prime, strict=strict)
        scale = max(1.0, float(np.max(np.abs(economy.d)))) if economy.n else 1.0
        try:
                if np.max(np.abs(dist)) <= 1e-12 * scale:
                        raise DegenerateDistribution('keine SCS-Streuung')
                peakedness = kurtosis(dist)
        except DegenerateDistribution:
                peakedness = math.nan
        shocked = z != 1.0
        shocked_output = float(gross_output(economy)[shocked].sum()) if np.any(shocked) else 0.0
        log.info(
                '%s (%s): SCS %.6g, Kurtosis %.4g, %s Iterationen',
                method,
                solver,
                total,
                peakedness,
                solution.iterations,
        )
        return ShockResult(
                method=method,
                solver=solver,
                z=z,
                pi=solution.pi,
                b0=b0,
                B=B,
                v=v,
                v_prime=v_prime,
                scs_total=total,
                scs_dist=dist,
                kurtosis=peakedness,
                iterations=solution.iterations,
                residual=solution.residual,
                identity_gap=gap,
                shocked_output=shocked_output,
        )
