from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

SHARE_TOLERANCE = 1e-9
GAMMA_ZERO = 1e-9


def _readonly(values: object, ndim: int, name: str) -> np.ndarray:
        array = np.array(values, dtype=float)
        if array.ndim != ndim:
                raise ValueError(f'{name}: erwartet {ndim} Dimension(en), erhalten {array.ndim}')
        array.setflags(write=False)
        return array


def _optional_float(value: object) -> float:
        if value is None:
                return math.nan
        if isinstance(value, str):
                text = value.strip()
                if not text:
                        return math.nan
                return float(text)
        return float(value)


def _optional_int(value: object) -> int:
        number = _optional_float(value)
        return int(number) if math.isfinite(number) else 0


def _as_bool(value: object) -> bool:
        if isinstance(value, str):
                return value.strip().lower() in {'1', 'true', 'yes', 'ja'}
        if value is None or (isinstance(value, float) and math.isnan(value)):
                return False
        return bool(value)


@dataclass(frozen=True, eq=False)
class IOTable:
        """Input-Output-Tabelle eines Jahres in Kostenanteilen.

        Spalte ``j`` von ``A`` enthält die Anteile ``a_ij`` der Vorleistung ``i``
        an den Stückkosten des Sektors ``j``; ``a0`` ist die Wertschöpfungszeile
        und ``d`` die Endnachfrage.
        """

        A: np.ndarray
        a0: np.ndarray
        d: np.ndarray
        labels: tuple[str, ...] = field(default=())
        year: int = field(default=0)

        def __post_init__(self) -> None:
                A = _readonly(self.A, 2, 'A')
                a0 = _readonly(self.a0, 1, 'a0')
                d = _readonly(self.d, 1, 'd')
                n = A.shape[0]
                if A.shape != (n, n):
                        raise ValueError(f'A muss quadratisch sein, erhalten {A.shape}')
                if a0.shape != (n,) or d.shape != (n,):
                        raise ValueError(f'a0/d passen nicht zu n={n}: {a0.shape}, {d.shape}')
                labels = tuple(str(label) for label in self.labels) if self.labels else tuple(
                        f'sector_{index + 1}' for index in range(n)
                )
                if len(labels) != n:
                        raise ValueError(f'{len(labels)} Bezeichnungen für {n} Sektoren')
                object.__setattr__(self, 'A', A)
                object.__setattr__(self, 'a0', a0)
                object.__setattr__(self, 'd', d)
                object.__setattr__(self, 'labels', labels)
                object.__setattr__(self, 'year', int(self.year))

        @property
        def n(self) -> int:
                return self.A.shape[0]

        def shares(self) -> np.ndarray:
                """Gesamte Anteilstabelle (n+1)×n, Zeile 0 = Primärfaktor."""

                return np.vstack([self.a0, self.A])

        def column_sums(self) -> np.ndarray:
                return self.a0 + self.A.sum(axis=0)

        def renormalized(self) -> IOTable:
                """Setzt a0 = 1 − Spaltensumme, für gerundete Quelldaten."""

                return self.copy(a0=1.0 - self.A.sum(axis=0))

        def copy(self, **updates: object) -> IOTable:
                return replace(self, **updates)

        def to_dict(self) -> dict:
                return {
                        'year': self.year,
                        'labels': list(self.labels),
                        'A': self.A.tolist(),
                        'a0': self.a0.tolist(),
                        'd': self.d.tolist(),
                }

        @classmethod
        def from_row(cls, row: dict) -> IOTable:
                return cls(
                        A=row['A'],
                        a0=row['a0'],
                        d=row['d'],
                        labels=tuple(row.get('labels') or ()),
                        year=int(row.get('year') or 0),
                )


@dataclass(frozen=True, eq=False)
class DeflatorVector:
        """Deflatoren: Index 0 = Primärfaktor, 1..n = Güter (Zieljahr / Referenzjahr)."""

        p: np.ndarray

        def __post_init__(self) -> None:
                object.__setattr__(self, 'p', _readonly(self.p, 1, 'p'))

        @property
        def n(self) -> int:
                return self.p.shape[0] - 1

        @property
        def primary(self) -> float:
                return float(self.p[0])

        def output(self, sector: int) -> float:
                return float(self.p[sector + 1])

        def to_dict(self) -> dict:
                return {'deflators': self.p.tolist()}

        @classmethod
        def from_row(cls, row: dict | Sequence[float]) -> DeflatorVector:
                if isinstance(row, dict):
                        return cls(p=row['deflators'])
                return cls(p=row)


@dataclass(frozen=True, eq=False)
class LinkedObservation:
        """Zwei verknüpfte Tabellen (Referenz- und Zieljahr) samt Deflatoren."""

        table0: IOTable
        table1: IOTable
        deflators: DeflatorVector

        @property
        def n(self) -> int:
                return self.table0.n

        @property
        def labels(self) -> tuple[str, ...]:
                return self.table0.labels


SAMPLE_OK = 'ok'
SAMPLE_INSUFFICIENT = 'insufficient'


@dataclass(frozen=True, eq=False)
class RegressionSample:
        """Regressionsdaten eines Sektors: Anteilswachstum y gegen relatives Preiswachstum x."""

        sector: int
        factors: np.ndarray
        y: np.ndarray
        x: np.ndarray
        label: str = field(default='')
        flag: str = field(default=SAMPLE_OK)

        def __post_init__(self) -> None:
                object.__setattr__(self, 'factors', np.array(self.factors, dtype=int))
                object.__setattr__(self, 'y', _readonly(self.y, 1, 'y'))
                object.__setattr__(self, 'x', _readonly(self.x, 1, 'x'))
                if not (len(self.factors) == len(self.y) == len(self.x)):
                        raise ValueError('factors, y und x müssen gleich lang sein')

        @property
        def n_obs(self) -> int:
                return len(self.y)

        @property
        def estimable(self) -> bool:
                return self.flag == SAMPLE_OK

        @property
        def rows(self) -> list[tuple[int, float, float]]:
                return [
                        (int(factor), float(y), float(x))
                        for factor, y, x in zip(self.factors, self.y, self.x)
                ]

        @classmethod
        def from_xy(cls, x: Iterable[float], y: Iterable[float], sector: int = 0) -> RegressionSample:
                x_values = np.asarray(list(x), dtype=float)
                return cls(
                        sector=sector,
                        factors=np.arange(len(x_values)),
                        x=x_values,
                        y=np.asarray(list(y), dtype=float),
                )


STATUS_OK = 'ok'
STATUS_NULL = 'null'
STATUS_INSUFFICIENT = 'insufficient'
STATUS_DEGENERATE = 'degenerate'


@dataclass
class SectorEstimate:
        """Schätzergebnis eines Sektors (Elastizität, TFP-Wachstum, Signifikanz)."""

        sector: int = field(default=0)
        label: str = field(default='')
        status: str = field(default=STATUS_OK)
        slope: float = field(default=math.nan)
        gamma: float = field(default=0.0)
        sigma: float = field(default=1.0)
        intercept: float = field(default=math.nan)
        tfpg: float = field(default=math.nan)
        se_slope: float = field(default=math.nan)
        se_intercept: float = field(default=math.nan)
        p_slope: float = field(default=math.nan)
        p_intercept: float = field(default=math.nan)
        stars_slope: str = field(default='')
        stars_intercept: str = field(default='')
        n_obs: int = field(default=0)
        boot_p: float = field(default=math.nan)
        ci_lo: float = field(default=math.nan)
        ci_hi: float = field(default=math.nan)
        accepted_null: bool = field(default=True)
        tfpg_translog: float = field(default=math.nan)

        @property
        def significant(self) -> bool:
                return not self.accepted_null

        @property
        def tfpg_defined(self) -> bool:
                return not self.accepted_null and math.isfinite(self.tfpg)

        def raw_gamma(self) -> float:
                """Punktschätzung unabhängig von der Signifikanz (0 wenn nicht schätzbar)."""

                return self.slope if math.isfinite(self.slope) else 0.0

        def to_dict(self) -> dict:
                """Zeile für ``estimates.csv``; Sektoren werden 1-basiert ausgegeben."""

                return {
                        'sector': self.sector + 1,
                        'label': self.label,
                        'sigma': self.sigma,
                        'gamma': self.gamma,
                        'tfpg': self.tfpg,
                        'p_slope': self.p_slope,
                        'stars_slope': self.stars_slope,
                        'p_intercept': self.p_intercept,
                        'stars_intercept': self.stars_intercept,
                        'boot_p': self.boot_p,
                        'ci_lo': self.ci_lo,
                        'ci_hi': self.ci_hi,
                        'n_obs': self.n_obs,
                        'accepted_null': self.accepted_null,
                        'slope': self.slope,
                        'intercept': self.intercept,
                        'se_slope': self.se_slope,
                        'se_intercept': self.se_intercept,
                        'tfpg_translog': self.tfpg_translog,
                        'status': self.status,
                }

        @classmethod
        def from_row(cls, row: dict) -> SectorEstimate:
                """Erzeugt eine Schätzung aus einer CSV-Zeile von ``estimates.csv``."""

                def text(key: str) -> str:
                        value = row.get(key)
                        if value is None or (isinstance(value, float) and math.isnan(value)):
                                return ''
                        return str(value).strip()

                return cls(
                        sector=int(float(row['sector'])) - 1,
                        label=text('label'),
                        status=text('status') or STATUS_OK,
                        slope=_optional_float(row.get('slope', row.get('gamma'))),
                        gamma=_optional_float(row.get('gamma')),
                        sigma=_optional_float(row.get('sigma')),
                        intercept=_optional_float(row.get('intercept')),
                        tfpg=_optional_float(row.get('tfpg')),
                        se_slope=_optional_float(row.get('se_slope')),
                        se_intercept=_optional_float(row.get('se_intercept')),
                        p_slope=_optional_float(row.get('p_slope')),
                        p_intercept=_optional_float(row.get('p_intercept')),
                        stars_slope=text('stars_slope'),
                        stars_intercept=text('stars_intercept'),
                        n_obs=_optional_int(row.get('n_obs')),
                        boot_p=_optional_float(row.get('boot_p')),
                        ci_lo=_optional_float(row.get('ci_lo')),
                        ci_hi=_optional_float(row.get('ci_hi')),
                        accepted_null=_as_bool(row.get('accepted_null')),
                        tfpg_translog=_optional_float(row.get('tfpg_translog')),
                )

        def copy(self, **updates: object) -> SectorEstimate:
                return replace(self, **updates)


ESTIMATE_COLUMNS = list(SectorEstimate().to_dict().keys())


@dataclass(frozen=True)
class AgreementReport:
        """Übereinstimmung zweier TFPg-Messungen (Pearson und Lin-Konkordanz)."""

        subset: str
        pearson: float
        lin_ccc: float
        n: int

        def to_dict(self) -> dict:
                return {
                        'subset': self.subset,
                        'concordance': self.lin_ccc,
                        'correlation': self.pearson,
                        'obs': self.n,
                }


@dataclass(frozen=True, eq=False)
class Economy:
        """Kalibrierte Volkswirtschaft: Tabelle zu Einheitspreisen plus γ je Sektor."""

        table: IOTable
        gamma: np.ndarray

        def __post_init__(self) -> None:
                gamma = _readonly(self.gamma, 1, 'gamma')
                if gamma.shape != (self.table.n,):
                        raise ValueError(f'gamma hat Länge {gamma.shape[0]}, erwartet {self.table.n}')
                if not np.all(np.isfinite(gamma)):
                        raise ValueError('gamma muss endlich sein')
                object.__setattr__(self, 'gamma', gamma)

        @property
        def n(self) -> int:
                return self.table.n

        @property
        def A(self) -> np.ndarray:
                return self.table.A

        @property
        def a0(self) -> np.ndarray:
                return self.table.a0

        @property
        def d(self) -> np.ndarray:
                return self.table.d

        @property
        def labels(self) -> tuple[str, ...]:
                return self.table.labels

        @property
        def sigma(self) -> np.ndarray:
                return 1.0 - self.gamma

        def uniform_gamma(self) -> Optional[float]:
                """Liefert γ, falls alle Sektoren dieselbe Elastizität haben."""

                if np.all(self.gamma == self.gamma[0]):
                        return float(self.gamma[0])
                return None

        def zero_gamma_mask(self) -> np.ndarray:
                return np.abs(self.gamma) < GAMMA_ZERO

        def with_gamma(self, gamma: Iterable[float] | float) -> Economy:
                values = np.broadcast_to(np.asarray(gamma, dtype=float), (self.n,))
                return Economy(table=self.table, gamma=values)

        def with_demand(self, d: Iterable[float]) -> Economy:
                return Economy(table=self.table.copy(d=np.asarray(list(d), dtype=float)), gamma=self.gamma)

        @classmethod
        def uniform(cls, table: IOTable, gamma: float) -> Economy:
                return cls(table=table, gamma=np.full(table.n, float(gamma)))


@dataclass(eq=False)
class ShockResult:
        """Ergebnis eines Produktivitätsschocks für eine Technologie-Annahme."""

        method: str
        solver: str
        z: np.ndarray
        pi: np.ndarray
        b0: np.ndarray
        B: np.ndarray
        v: np.ndarray
        v_prime: np.ndarray
        scs_total: float
        scs_dist: np.ndarray
        kurtosis: float = field(default=math.nan)
        iterations: int = field(default=0)
        residual: float = field(default=0.0)
        identity_gap: float = field(default=0.0)
        shocked_output: float = field(default=math.nan)

        def sector_rows(self, labels: Sequence[str]) -> list[dict]:
                return [
                        {
                                'method': self.method,
                                'sector': index + 1,
                                'label': labels[index],
                                'z': float(self.z[index]),
                                'pi': float(self.pi[index]),
                                'v': float(self.v[index]),
                                'v_prime': float(self.v_prime[index]),
                                'scs': float(self.scs_dist[index]),
                        }
                        for index in range(len(self.pi))
                ]

        def summary_row(self) -> dict:
                return {
                        'method': self.method,
                        'solver': self.solver,
                        'scs_total': self.scs_total,
                        'kurtosis': self.kurtosis,
                        'iterations': self.iterations,
                        'residual': self.residual,
                        'identity_gap': self.identity_gap,
                        'shocked_output': self.shocked_output,
                }
