from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from cesge.utils.validators import RunConfigValidator, ValidationError

APPLICATION = 'ces-ge'

DEFAULT_ALPHA = 0.1
DEFAULT_BOOTSTRAP_REPS = 400
DEFAULT_SEED = 0
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000
DEFAULT_DAMPING = 1.0
DEFAULT_GAMMA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_SIGMA_MAX = 2.0
DEFAULT_SEARCH_TRIALS = 200
DEFAULT_SHOCK_FACTOR = 2.0

METHOD_LEONTIEF = 'leontief'
METHOD_COBB_DOUGLAS = 'cobb-douglas'
METHOD_CES = 'ces'
METHOD_CES_ALL = 'ces-all'
METHOD_PAPER_CLOSED_FORM = 'ces-paper-closed-form'
METHODS = (
        METHOD_LEONTIEF,
        METHOD_COBB_DOUGLAS,
        METHOD_CES,
        METHOD_CES_ALL,
        METHOD_PAPER_CLOSED_FORM,
)
ESTIMATE_METHODS = (METHOD_CES, METHOD_CES_ALL, METHOD_PAPER_CLOSED_FORM)


def parse_float_list(text: str) -> tuple[float, ...]:
        try:
                return tuple(float(part) for part in text.split(',') if part.strip())
        except ValueError as exc:
                raise ValidationError(f'Zahlenliste nicht lesbar: {text!r}') from exc


def parse_range(text: str) -> tuple[float, float]:
        values = parse_float_list(text)
        if len(values) != 2 or values[0] > values[1]:
                raise ValidationError(f'Intervall erwartet als "lo,hi": {text!r}')
        return values[0], values[1]


def parse_shock(text: str) -> tuple[str, float]:
        """Zerlegt ``"sector=150,factor=2.0"`` in (Sektor, Multiplikator)."""

        parts: dict[str, str] = {}
        for chunk in text.split(','):
                if '=' not in chunk:
                        raise ValidationError(f'Schock ohne "=": {text!r}')
                key, value = chunk.split('=', 1)
                parts[key.strip().lower()] = value.strip()
        if 'sector' not in parts or 'factor' not in parts:
                raise ValidationError(f'Schock braucht sector= und factor=: {text!r}')
        try:
                factor = float(parts['factor'])
        except ValueError as exc:
                raise ValidationError(f'Multiplikator nicht lesbar: {text!r}') from exc
        return parts['sector'], factor


def resolve_sector(key: str, labels: Sequence[str]) -> int:
        """Sektor über 1-basierte Nummer oder Bezeichnung auflösen (Rückgabe 0-basiert)."""

        text = key.strip()
        if text.isdigit():
                index = int(text) - 1
                if not 0 <= index < len(labels):
                        raise ValidationError(f'Sektor {text} außerhalb 1..{len(labels)}')
                return index
        lowered = [label.lower() for label in labels]
        if text.lower() in lowered:
                return lowered.index(text.lower())
        raise ValidationError(f'Sektor {text!r} nicht gefunden')


def shock_vector(shocks: Iterable[tuple[str, float]], labels: Sequence[str]) -> np.ndarray:
        z = np.ones(len(labels))
        for key, factor in shocks:
                if not factor > 0:
                        raise ValidationError(f'Multiplikator muss positiv sein: {factor}')
                z[resolve_sector(key, labels)] = factor
        return z


@dataclass
class RunConfig:
        """Einstellungen eines CLI-Laufs."""

        subcommand: str = field(default='')
        period0: Optional[Path] = field(default=None)
        period1: Optional[Path] = field(default=None)
        deflators: Optional[Path] = field(default=None)
        economy: Optional[Path] = field(default=None)
        estimates: Optional[Path] = field(default=None)
        out: Path = field(default=Path('.'))
        alpha: float = field(default=DEFAULT_ALPHA)
        bootstrap_reps: int = field(default=DEFAULT_BOOTSTRAP_REPS)
        bootstrap_scheme: str = field(default='pairs')
        robust: bool = field(default=False)
        seed: int = field(default=DEFAULT_SEED)
        jobs: int = field(default=1)
        methods: tuple[str, ...] = field(default=(METHOD_CES,))
        shocks: tuple[tuple[str, float], ...] = field(default=())
        tol: float = field(default=DEFAULT_TOL)
        max_iter: int = field(default=DEFAULT_MAX_ITER)
        damping: float = field(default=DEFAULT_DAMPING)
        renormalize: bool = field(default=False)
        exclude_diagonal: bool = field(default=False)
        gamma_grid: tuple[float, ...] = field(default=DEFAULT_GAMMA_GRID)
        direction: str = field(default='up')
        factor: float = field(default=DEFAULT_SHOCK_FACTOR)
        sigma_max: float = field(default=DEFAULT_SIGMA_MAX)
        search_trials: int = field(default=DEFAULT_SEARCH_TRIALS)
        n: int = field(default=50)
        noise: float = field(default=0.0)
        gamma_range: tuple[float, float] = field(default=(0.2, 1.0))
        z_range: tuple[float, float] = field(default=(0.7, 1.5))
        density: float = field(default=0.6)
        write_json: bool = field(default=False)
        write_xlsx: bool = field(default=False)

        @classmethod
        def from_namespace(cls, namespace: argparse.Namespace) -> RunConfig:
                """Übernimmt alle bekannten Felder aus einem argparse-Namespace."""

                values = {
                        key: value
                        for key, value in vars(namespace).items()
                        if key in cls.__dataclass_fields__ and value is not None
                }
                if 'methods' in values:
                        methods: list[str] = []
                        for entry in values['methods']:
                                methods.extend(part.strip() for part in entry.split(',') if part.strip())
                        values['methods'] = tuple(methods)
                if 'shocks' in values:
                        values['shocks'] = tuple(parse_shock(text) for text in values['shocks'])
                for key in ('period0', 'period1', 'deflators', 'economy', 'estimates', 'out'):
                        if key in values:
                                values[key] = Path(values[key])
                config = cls(**values)
                ok, errors = RunConfigValidator.validate(config)
                if not ok:
                        raise ValidationError('; '.join(errors.values()))
                return config
