from __future__ import annotations

import logging
import math
from typing import NamedTuple, Optional

import numpy as np

from cesge.data.models import Economy, IOTable

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000
OSCILLATION_DAMPING = 0.5
OSCILLATION_STREAK = 3
MAX_NEUMANN_TERMS = 100_000


class EquilibriumError(RuntimeError):
        """Fehler beim Lösen des Preissystems."""


class NonConvergence(EquilibriumError):
        """Fixpunktiteration hat die Toleranz nicht erreicht."""


class NonpositivePrice(EquilibriumError):
        """Preis nicht positiv oder nicht endlich."""


class SingularSystem(EquilibriumError):
        """Lineares System singulär oder ohne nichtnegative Inverse."""


class ZeroGamma(EquilibriumError):
        """Geschlossene CES-Form für γ = 0 nicht definiert."""


class PriceSolution(NamedTuple):
        pi: np.ndarray
        iterations: int
        residual: float


def _check_z(z: np.ndarray, n: int) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (n,):
                raise ValueError(f'z hat Form {z.shape}, erwartet ({n},)')
        if not np.all(z > 0) or not np.all(np.isfinite(z)):
                raise ValueError('Produktivitätsmultiplikatoren müssen positiv und endlich sein')
        return z


def solve_row(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """Löst den Zeilenvektor x in x · matrix = rhs."""

        try:
                return np.linalg.solve(matrix.T, rhs)
        except np.linalg.LinAlgError as exc:
                raise SingularSystem(str(exc)) from exc


def spectral_radius(matrix: np.ndarray) -> float:
        if matrix.size == 0:
                return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(matrix))))


def _require_dominance(A: np.ndarray, diagonal: np.ndarray) -> None:
        """[⟨diagonal⟩ − A]⁻¹ ≥ 0 genau dann, wenn ρ(A⟨diagonal⟩⁻¹) < 1."""

        radius = spectral_radius(A / diagonal[None, :])
        if not radius < 1.0:
                raise SingularSystem(f'Spektralradius {radius:.6g} ≥ 1, keine nichtnegative Inverse')


def leontief_inverse(A: np.ndarray) -> np.ndarray:
        n = A.shape[0]
        try:
                return np.linalg.inv(np.eye(n) - A)
        except np.linalg.LinAlgError as exc:
                raise SingularSystem(str(exc)) from exc


def gross_output(table: IOTable | Economy, d: Optional[np.ndarray] = None) -> np.ndarray:
        """Bruttoproduktion x = [I − A]⁻¹ d."""

        A = table.A
        demand = table.d if d is None else np.asarray(d, dtype=float)
        try:
                return np.linalg.solve(np.eye(A.shape[0]) - A, demand)
        except np.linalg.LinAlgError as exc:
                raise SingularSystem(str(exc)) from exc


def neumann_series(A: np.ndarray, z: np.ndarray, gamma: np.ndarray | float, tol: float = 1e-15) -> tuple[np.ndarray, int]:
        """[⟨z^γ⟩ − A]⁻¹ als Reihe D⁻¹ Σ_k (A D⁻¹)^k mit D = ⟨z^γ⟩.

        Für einheitliches z reduziert sich das auf ⟨z^(−γ)⟩ + A⟨z^(−2γ)⟩ + A²⟨z^(−3γ)⟩ + …
        Rückgabe: Summe und Anzahl der Glieder.
        """

        n = A.shape[0]
        scale = np.power(np.asarray(z, dtype=float), np.broadcast_to(gamma, (n,)))
        _require_dominance(A, scale)
        step = A / scale[None, :]
        inverse_scale = np.diag(1.0 / scale)
        power = np.eye(n)
        total = np.zeros((n, n))
        for terms in range(1, MAX_NEUMANN_TERMS + 1):
                total += inverse_scale @ power
                power = power @ step
                if np.max(np.abs(power)) < tol:
                        return total, terms
        raise NonConvergence(f'Neumann-Reihe nach {MAX_NEUMANN_TERMS} Gliedern nicht konvergiert')


def _unit_cost_map(economy: Economy, log_z: np.ndarray, ln_pi: np.ndarray, slack: np.ndarray, zero: np.ndarray) -> np.ndarray:
        """Ein Schritt ln π ↦ ln c(π)/z der Stückkostengleichungen (π_0 = 1)."""

        gamma = economy.gamma
        A = economy.A
        safe_gamma = np.where(zero, 1.0, gamma)
        spread = np.expm1(ln_pi[:, None] * safe_gamma[None, :])
        inner = slack + (A * spread).sum(axis=0)
        with np.errstate(invalid='ignore', divide='ignore'):
                ces = np.log1p(inner) / safe_gamma
        cobb_douglas = A.T @ ln_pi
        return -log_z + np.where(zero, cobb_douglas, ces)


def price_residual(economy: Economy, z: np.ndarray, pi: np.ndarray) -> float:
        """max_j |π_j − c_j(π)/z_j| für das System mit Exponent γ_j je Sektor."""

        z = _check_z(z, economy.n)
        pi = np.asarray(pi, dtype=float)
        if not np.all(pi > 0):
                return math.inf
        slack = economy.a0 + economy.A.sum(axis=0) - 1.0
        mapped = _unit_cost_map(economy, np.log(z), np.log(pi), slack, economy.zero_gamma_mask())
        return float(np.max(np.abs(np.exp(mapped) - pi))) if economy.n else 0.0


def solve_prices_fixed_point(
        economy: Economy,
        z: np.ndarray,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
        damping: float = 1.0,
) -> PriceSolution:
        """Fixpunktiteration der Gleichgewichtspreise, Start bei π = 1.

        Sektoren mit |γ_j| < 1e-9 laufen über die logarithmische Cobb-Douglas-Form.
        Steigt die Änderung dreimal hintereinander, wird auf Dämpfung 0.5 umgestellt.
        """

        z = _check_z(z, economy.n)
        log_z = np.log(z)
        zero = economy.zero_gamma_mask()
        slack = economy.a0 + economy.A.sum(axis=0) - 1.0
        ln_pi = np.zeros(economy.n)
        pi = np.ones(economy.n)
        change = math.inf
        rising = 0
        for iteration in range(1, max_iter + 1):
                target = _unit_cost_map(economy, log_z, ln_pi, slack, zero)
                next_ln_pi = target if damping == 1.0 else (1.0 - damping) * ln_pi + damping * target
                if not np.all(np.isfinite(next_ln_pi)):
                        raise NonpositivePrice(f'Iteration {iteration}: Preis nicht positiv oder nicht endlich')
                next_pi = np.exp(next_ln_pi)
                if np.any(next_pi <= 0.0):
                        raise NonpositivePrice(f'Iteration {iteration}: Preis unterläuft auf 0')
                previous_change = change
                change = float(np.max(np.abs(next_pi - pi))) if economy.n else 0.0
                ln_pi, pi = next_ln_pi, next_pi
                if change < tol:
                        log.debug('Fixpunkt nach %s Iterationen, Änderung %.3g', iteration, change)
                        return PriceSolution(pi=pi, iterations=iteration, residual=change)
                rising = rising + 1 if change > previous_change else 0
                if rising >= OSCILLATION_STREAK and damping > OSCILLATION_DAMPING:
                        log.warning('Iteration %s: Änderung steigt, Dämpfung %.2g aktiviert', iteration, OSCILLATION_DAMPING)
                        damping = OSCILLATION_DAMPING
                        rising = 0
        raise NonConvergence(f'keine Konvergenz nach {max_iter} Iterationen (Änderung {change:.3g})')


def solve_prices_closed_form(economy: Economy, z: np.ndarray) -> PriceSolution:
        """π = (a0 · [⟨z^γ⟩ − A]⁻¹)^(1/γ), elementweise Exponenten.

        Exakt für einheitliches γ; bei heterogenem γ wird die Matrixformel
        unverändert ausgewertet.
        """

        z = _check_z(z, economy.n)
        if np.any(economy.zero_gamma_mask()):
                raise ZeroGamma(f'γ = 0 in Sektor(en) {list(np.flatnonzero(economy.zero_gamma_mask()) + 1)}')
        gamma = economy.gamma
        scale = np.power(z, gamma)
        _require_dominance(economy.A, scale)
        weights = solve_row(np.diag(scale) - economy.A, economy.a0)
        if not np.all(weights > 0):
                raise NonpositivePrice('a0 · [⟨z^γ⟩ − A]⁻¹ nicht positiv')
        pi = np.exp(np.log(weights) / gamma)
        return PriceSolution(pi=pi, iterations=0, residual=price_residual(economy, z, pi))


def solve_prices_leontief(economy: Economy, z: np.ndarray) -> PriceSolution:
        """π = a0 · [⟨z⟩ − A]⁻¹ (γ = 1 in allen Sektoren)."""

        z = _check_z(z, economy.n)
        _require_dominance(economy.A, z)
        pi = solve_row(np.diag(z) - economy.A, economy.a0)
        if not np.all(pi > 0):
                raise NonpositivePrice('Leontief-Preise nicht positiv')
        return PriceSolution(pi=pi, iterations=0, residual=price_residual(economy.with_gamma(1.0), z, pi))


def solve_prices_cobb_douglas(economy: Economy, z: np.ndarray) -> PriceSolution:
        """ln π = −ln z · [I − A]⁻¹ (γ = 0 in allen Sektoren)."""

        z = _check_z(z, economy.n)
        ln_pi = solve_row(np.eye(economy.n) - economy.A, -np.log(z))
        pi = np.exp(ln_pi)
        return PriceSolution(pi=pi, iterations=0, residual=price_residual(economy.with_gamma(0.0), z, pi))
