from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from pandas.api.types import is_numeric_dtype

from .models import DeflatorVector, IOTable, LinkedObservation, SectorEstimate
from .repository import (
        AbstractRepository,
        RepositoryError,
        check_table,
        read_manifest,
        resolve_entry,
        write_manifest,
)

log = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def read_frame(path: Path) -> pd.DataFrame:
        path = Path(path)
        try:
                frame = pd.read_csv(path, encoding='utf-8', float_precision='round_trip')
        except FileNotFoundError as exc:
                raise RepositoryError(f'{path}: Datei fehlt') from exc
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
                raise RepositoryError(f'{path}: CSV nicht lesbar ({exc})') from exc
        if frame.shape[1] > 1 and not is_numeric_dtype(frame.iloc[:, 0]):
                frame = frame.set_index(frame.columns[0])
        return frame


def read_matrix(path: Path) -> np.ndarray:
        frame = read_frame(path)
        try:
                return frame.to_numpy(dtype=float)
        except ValueError as exc:
                raise RepositoryError(f'{path}: nicht-numerische Einträge ({exc})') from exc


def read_vector(path: Path) -> np.ndarray:
        """Liest eine Zeile (1×n) oder eine Spalte (n×1) als Vektor."""

        values = read_matrix(path)
        if values.ndim != 2 or min(values.shape) != 1:
                raise RepositoryError(f'{Path(path)}: Vektor erwartet, erhalten {values.shape}')
        return values.ravel()


def read_labels(path: Path) -> tuple[str, ...]:
        try:
                frame = pd.read_csv(Path(path), encoding='utf-8', dtype=str, keep_default_na=False)
        except FileNotFoundError as exc:
                raise RepositoryError(f'{path}: Datei fehlt') from exc
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
                raise RepositoryError(f'{path}: CSV nicht lesbar ({exc})') from exc
        return tuple(frame.iloc[:, -1].str.strip())


class CSVRepository(AbstractRepository):
        """Manifest plus CSV-Dateien je Periode."""

        def load_table(self, source: Path, renormalize: bool = False) -> IOTable:
                manifest = Path(source)
                entries = read_manifest(manifest)
                A = read_matrix(resolve_entry(manifest, entries, 'A'))
                a0 = read_vector(resolve_entry(manifest, entries, 'a0'))
                d = read_vector(resolve_entry(manifest, entries, 'd'))
                labels = read_labels(resolve_entry(manifest, entries, 'labels'))
                try:
                        year = int(entries.get('year', '0') or 0)
                        table = IOTable(A=A, a0=a0, d=d, labels=labels, year=year)
                except ValueError as exc:
                        raise RepositoryError(f'{manifest}: {exc}') from exc
                if renormalize:
                        table = table.renormalized()
                log.info('Tabelle %s geladen: n=%s, Jahr %s', manifest, table.n, table.year)
                return check_table(table, manifest)

        def load_deflators(self, source: Path) -> DeflatorVector:
                path = Path(source)
                if path.suffix.lower() != '.csv':
                        path = resolve_entry(path, read_manifest(path), 'deflators')
                return DeflatorVector(p=read_vector(path))

        def save_observation(self, directory: Path, obs: LinkedObservation) -> dict[str, Path]:
                directory = Path(directory)
                directory.mkdir(parents=True, exist_ok=True)
                written: dict[str, Path] = {}
                labels_path = directory / 'labels.csv'
                pd.DataFrame({'label': list(obs.labels)}).to_csv(labels_path, index=False)
                written['labels'] = labels_path
                deflators_path = directory / 'deflators.csv'
                pd.DataFrame({'p': obs.deflators.p}).to_csv(deflators_path, index=False, float_format=FLOAT_FORMAT)
                written['deflators'] = deflators_path

                same_year = obs.table0.year == obs.table1.year
                for index, table in enumerate((obs.table0, obs.table1)):
                        tag = f'{table.year}_{index}' if same_year else f'{table.year}'
                        files = self._write_table(directory, table, tag)
                        entries: dict[str, object] = {name: path.name for name, path in files.items()}
                        entries['labels'] = labels_path.name
                        entries['year'] = table.year
                        if index == 1:
                                entries['deflators'] = deflators_path.name
                        written[f'period{index}'] = write_manifest(directory / f'period{index}.manifest', entries)
                        written.update({f'{name}_{index}': path for name, path in files.items()})
                log.info('Bündel geschrieben: %s', directory)
                return written

        @staticmethod
        def _write_table(directory: Path, table: IOTable, tag: str) -> dict[str, Path]:
                labels = list(table.labels)
                paths = {
                        'A': directory / f'A_{tag}.csv',
                        'a0': directory / f'a0_{tag}.csv',
                        'd': directory / f'd_{tag}.csv',
                }
                pd.DataFrame(table.A, columns=labels).to_csv(paths['A'], index=False, float_format=FLOAT_FORMAT)
                pd.DataFrame([table.a0], columns=labels).to_csv(paths['a0'], index=False, float_format=FLOAT_FORMAT)
                pd.DataFrame({'d': table.d}).to_csv(paths['d'], index=False, float_format=FLOAT_FORMAT)
                return paths


def read_estimates(path: Path) -> list[SectorEstimate]:
        """Liest ``estimates.csv`` zurück in Schätzobjekte (Sektoren 1-basiert in der Datei)."""

        path = Path(path)
        try:
                frame = pd.read_csv(path, encoding='utf-8', keep_default_na=True, float_precision='round_trip')
        except FileNotFoundError as exc:
                raise RepositoryError(f'{path}: Datei fehlt') from exc
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
                raise RepositoryError(f'{path}: CSV nicht lesbar ({exc})') from exc
        missing = {'sector', 'gamma'} - set(frame.columns)
        if missing:
                raise RepositoryError(f'{path}: Spalten fehlen: {", ".join(sorted(missing))}')
        try:
                estimates = [SectorEstimate.from_row(row) for row in frame.to_dict(orient='records')]
        except (TypeError, ValueError) as exc:
                raise RepositoryError(f'{path}: ungültige Zeile ({exc})') from exc
        log.info('%s Schätzungen aus %s geladen', len(estimates), path)
        return estimates
