from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from cesge.data.models import DeflatorVector, Economy, IOTable, LinkedObservation
from cesge.equilibrium.prices import (
        EquilibriumError,
        price_residual,
        solve_prices_closed_form,
        solve_prices_cobb_douglas,
        solve_prices_fixed_point,
)
from cesge.equilibrium.structure import projected_shares, scs, value_added_current, value_added_projected
from cesge.estimation.pipeline import estimate_observation

log = logging.getLogger(__name__)

BASE_YEAR = 2000
TARGET_YEAR = 2005
MIN_COEFFICIENT = 0.1
TRUTH_COLUMNS = ['sector', 'label', 'gamma', 'sigma', 'z', 'ln_z', 'pi']


@dataclass(frozen=True)
class SyntheticSpec:
        """Parameter einer synthetischen Volkswirtschaft."""

        n: int = field(default=50)
        seed: int = field(default=0)
        gamma_range: tuple[float, float] = field(default=(0.2, 1.0))
        z_range: tuple[float, float] = field(default=(0.7, 1.5))
        density: float = field(default=0.6)
        noise_sd: float = field(default=0.0)
        demand_scale: float = field(default=100.0)
        colsum_range: tuple[float, float] = field(default=(0.3, 0.8))

        def __post_init__(self) -> None:
                if self.n < 1:
                        raise ValueError('n muss mindestens 1 sein')
                if not 0.0 < self.density <= 1.0:
                        raise ValueError('density muss in (0, 1] liegen')
                if self.noise_sd < 0:
                        raise ValueError('noise_sd darf nicht negativ sein')
                low, high = self.colsum_range
                if not 0.0 <= low <= high < 1.0:
                        raise ValueError('Spaltensummen müssen in [0, 1) liegen')
                if self.gamma_range[0] > self.gamma_range[1] or self.z_range[0] > self.z_range[1]:
                        raise ValueError('Intervalle erwartet als (lo, hi)')
                if not self.z_range[0] > 0:
                        raise ValueError('z muss positiv sein')


def _sparsity_mask(rng: np.random.Generator, n: int, density: float) -> np.ndarray:
        """Zufällige Besetzung mit mindestens min(2, n) Einträgen je Spalte."""

        mask = rng.random((n, n)) < density
        required = min(2, n)
        for j in range(n):
                missing = required - int(mask[:, j].sum())
                if missing > 0:
                        empty = np.flatnonzero(~mask[:, j])
                        mask[rng.choice(empty, size=missing, replace=False), j] = True
        return mask


def generate_economy(spec: SyntheticSpec) -> Economy:
        """Zufällige, gültige Volkswirtschaft; deterministisch im Seed."""

        rng = np.random.default_rng(spec.seed)
        n = spec.n
        mask = _sparsity_mask(rng, n, spec.density)
        weights = rng.uniform(MIN_COEFFICIENT, 1.0, size=(n, n)) * mask
        colsum = rng.uniform(*spec.colsum_range, size=n)
        A = weights / weights.sum(axis=0)[None, :] * colsum[None, :]
        a0 = 1.0 - A.sum(axis=0)
        d = rng.uniform(0.5, 1.5, size=n) * spec.demand_scale
        gamma = rng.uniform(*spec.gamma_range, size=n)
        table = IOTable(A=A, a0=a0, d=d, year=BASE_YEAR)
        log.debug('Volkswirtschaft erzeugt: n=%s, Seed %s', n, spec.seed)
        return Economy(table=table, gamma=gamma)


def draw_shock(spec: SyntheticSpec) -> np.ndarray:
        rng = np.random.default_rng([spec.seed, 1])
        return rng.uniform(*spec.z_range, size=spec.n)


def simulate_linked_observation(
        economy: Economy,
        z: np.ndarray,
        noise_sd: float = 0.0,
        seed: int = 0,
) -> LinkedObservation:
        """Zieljahr-Tabelle aus den Gleichgewichtsanteilen, Deflatoren (1, π).

        Bei ``noise_sd > 0`` werden die Anteile multiplikativ lognormal gestört
        und spaltenweise renormiert.
        """

        z = np.asarray(z, dtype=float)
        pi = solve_prices_fixed_point(economy, z).pi
        b0, B = projected_shares(economy, z, pi)
        shares = np.vstack([b0, B])
        if noise_sd > 0:
                rng = np.random.default_rng([seed, 2])
                shares = shares * np.exp(rng.normal(0.0, noise_sd, size=shares.shape))
                shares = shares / shares.sum(axis=0)[None, :]
        base = economy.table
        table1 = IOTable(A=shares[1:], a0=shares[0], d=base.d, labels=base.labels, year=base.year + (TARGET_YEAR - BASE_YEAR))
        deflators = DeflatorVector(p=np.concatenate([[1.0], pi]))
        return LinkedObservation(table0=base, table1=table1, deflators=deflators)


def truth_frame(economy: Economy, z: np.ndarray, pi: Optional[np.ndarray] = None) -> pd.DataFrame:
        if pi is None:
                pi = solve_prices_fixed_point(economy, z).pi
        return pd.DataFrame(
                {
                        'sector': np.arange(1, economy.n + 1),
                        'label': list(economy.labels),
                        'gamma': economy.gamma,
                        'sigma': economy.sigma,
                        'z': z,
                        'ln_z': np.log(z),
                        'pi': pi,
                },
                columns=TRUTH_COLUMNS,
        )


@dataclass
class RoundtripReport:
        """Abweichungen der Schätzung von der Wahrheit plus Löser-Kreuzprüfungen."""

        sectors: pd.DataFrame
        solver_checks: dict[str, float]

        @property
        def max_gamma_error(self) -> float:
                return float(self.sectors['gamma_error'].max(skipna=True))

        @property
        def max_tfpg_error(self) -> float:
                return float(self.sectors['tfpg_error'].max(skipna=True))

        @property
        def max_translog_error(self) -> float:
                return float(self.sectors['translog_error'].max(skipna=True))

        def checks_frame(self) -> pd.DataFrame:
                return pd.DataFrame({'check': list(self.solver_checks), 'value': list(self.solver_checks.values())})


def _solver_checks(economy: Economy, z: np.ndarray, pi: np.ndarray) -> dict[str, float]:
        b0, B = projected_shares(economy, z, pi)
        v = value_added_current(economy)
        v_prime = value_added_projected(economy, z, pi, shares=(b0, B))
        _, _, gap = scs(economy, pi, v, v_prime, strict=False)
        uniform = economy.with_gamma(float(np.median(economy.gamma)) or 0.5)
        try:
                uniform_gap = float(np.max(np.abs(
                        solve_prices_fixed_point(uniform, z).pi - solve_prices_closed_form(uniform, z).pi
                )))
        except EquilibriumError as exc:
                log.warning('Kreuzprüfung bei einheitlichem γ nicht möglich: %s', exc)
                uniform_gap = math.nan
        cobb_douglas = economy.with_gamma(0.0)
        return {
                'fixed_point_residual': price_residual(economy, z, pi),
                'share_closure': float(np.max(np.abs(np.vstack([b0, B]).sum(axis=0) - 1.0))),
                'scs_identity_gap': gap,
                'uniform_closed_form_gap': uniform_gap,
                'cobb_douglas_gap': float(np.max(np.abs(
                        solve_prices_fixed_point(cobb_douglas, z).pi - solve_prices_cobb_douglas(cobb_douglas, z).pi
                ))),
        }


def roundtrip_report(spec: SyntheticSpec, z: Optional[np.ndarray] = None) -> RoundtripReport:
        """Erzeugen, simulieren, schätzen und mit der Wahrheit vergleichen."""

        economy = generate_economy(spec)
        z = draw_shock(spec) if z is None else np.asarray(z, dtype=float)
        obs = simulate_linked_observation(economy, z, noise_sd=spec.noise_sd, seed=spec.seed)
        run = estimate_observation(obs, reps=0)
        ln_z = np.log(z)
        rows = []
        for estimate in run.estimates:
                j = estimate.sector
                slope = estimate.slope
                tfpg = -estimate.intercept / slope if math.isfinite(slope) and slope != 0.0 else math.nan
                rows.append({
                        'sector': j + 1,
                        'label': estimate.label,
                        'status': estimate.status,
                        'gamma_true': economy.gamma[j],
                        'gamma_hat': slope,
                        'gamma_error': abs(slope - economy.gamma[j]),
                        'tfpg_true': ln_z[j],
                        'tfpg_hat': tfpg,
                        'tfpg_error': abs(tfpg - ln_z[j]),
                        'tfpg_translog': estimate.tfpg_translog,
                        'translog_error': abs(estimate.tfpg_translog - ln_z[j]),
                })
        pi = obs.deflators.p[1:]
        report = RoundtripReport(sectors=pd.DataFrame(rows), solver_checks=_solver_checks(economy, z, pi))
        log.info(
                'Roundtrip n=%s: max |Δγ| %.3g, max |ΔTFPg| %.3g',
                spec.n,
                report.max_gamma_error,
                report.max_tfpg_error,
        )
        return report
