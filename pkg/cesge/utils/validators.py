from __future__ import annotations

from typing import TYPE_CHECKING, Tuple

import numpy as np

from cesge.data.models import SHARE_TOLERANCE, DeflatorVector, IOTable, LinkedObservation

if TYPE_CHECKING:
        from cesge.utils.settings import RunConfig


class ValidationError(ValueError):
        """Fehler bei der Validierung von Eingaben oder Einstellungen."""


class TableValidator:
        """Prüft die Buchhaltungsregeln von Input-Output-Tabellen."""

        @staticmethod
        def validate_table(table: IOTable, tolerance: float = SHARE_TOLERANCE) -> list[str]:
                violations: list[str] = []
                if not np.all(np.isfinite(table.A)) or not np.all(np.isfinite(table.a0)):
                        violations.append('non-finite coefficient')
                if not np.all(np.isfinite(table.d)):
                        violations.append('non-finite final demand')

                for i, j in zip(*np.nonzero(table.A < 0)):
                        violations.append(f'negative coefficient at ({i},{j})')
                for j in np.flatnonzero(table.a0 < 0):
                        violations.append(f'negative primary coefficient at column {j}')

                for j, total in enumerate(table.column_sums()):
                        if np.isfinite(total) and abs(total - 1.0) > tolerance:
                                violations.append(f'column {j} shares sum {total:.12g} ≠ 1')
                return violations

        @staticmethod
        def validate_deflators(deflators: DeflatorVector, n: int | None = None) -> list[str]:
                violations: list[str] = []
                if n is not None and deflators.n != n:
                        violations.append(f'{deflators.n + 1} deflators for {n} sectors (expected {n + 1})')
                for index in np.flatnonzero(~(deflators.p > 0)):
                        violations.append(f'nonpositive deflator at {index}')
                return violations

        @classmethod
        def validate_observation(cls, obs: LinkedObservation) -> list[str]:
                violations = [f'period 0: {text}' for text in cls.validate_table(obs.table0)]
                violations += [f'period 1: {text}' for text in cls.validate_table(obs.table1)]
                if obs.table0.n != obs.table1.n:
                        violations.append(f'sector count differs: {obs.table0.n} vs {obs.table1.n}')
                elif obs.table0.labels != obs.table1.labels:
                        violations.append('sector labels differ between periods')
                violations += cls.validate_deflators(obs.deflators, obs.table0.n)
                return violations


class RunConfigValidator:
        """Enthält Validierungslogik für Laufkonfigurationen."""

        @staticmethod
        def validate(config: RunConfig) -> Tuple[bool, dict]:
                from cesge.utils.settings import METHODS

                errors: dict[str, str] = {}
                if not 0.0 < config.alpha < 1.0:
                        errors['alpha'] = f'alpha muss in (0,1) liegen, erhalten {config.alpha}'
                if config.bootstrap_reps < 0:
                        errors['bootstrap_reps'] = 'Anzahl Replikationen darf nicht negativ sein'
                unknown = [method for method in config.methods if method not in METHODS]
                if unknown:
                        errors['method'] = f'unbekannte Methode(n): {", ".join(unknown)}'
                bad_factors = [factor for _, factor in config.shocks if not factor > 0]
                if bad_factors:
                        errors['shock'] = f'Multiplikator muss positiv sein: {bad_factors}'
                if config.tol <= 0:
                        errors['tol'] = 'Toleranz muss positiv sein'
                if config.max_iter < 1:
                        errors['max_iter'] = 'max_iter muss mindestens 1 sein'
                if not 0.0 < config.damping <= 1.0:
                        errors['damping'] = 'Dämpfung muss in (0,1] liegen'
                if not config.factor > 0:
                        errors['factor'] = 'Schockstärke muss positiv sein'
                if config.sigma_max < 0 or config.search_trials < 0:
                        errors['search'] = 'sigma_max und search_trials dürfen nicht negativ sein'
                if config.jobs == 0:
                        errors['jobs'] = 'jobs darf nicht 0 sein'
                if config.n < 1:
                        errors['n'] = 'mindestens ein Sektor'
                if config.noise < 0:
                        errors['noise'] = 'Rauschen darf nicht negativ sein'
                if not 0.0 < config.density <= 1.0:
                        errors['density'] = 'density muss in (0,1] liegen'
                return len(errors) == 0, errors
