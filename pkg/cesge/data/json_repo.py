from __future__ import annotations

import json
import logging
from pathlib import Path

from .csv_repo import read_vector
from .models import DeflatorVector, IOTable, LinkedObservation
from .repository import AbstractRepository, RepositoryError, check_table

log = logging.getLogger(__name__)


class JSONRepository(AbstractRepository):
        """JSON-Bündel: eine Datei je Periode mit A, a0, d, labels und year."""

        def _load(self, path: Path) -> dict:
                try:
                        with Path(path).open('r', encoding='utf-8') as fh:
                                data = json.load(fh)
                except FileNotFoundError as exc:
                        raise RepositoryError(f'{path}: Datei fehlt') from exc
                except (OSError, json.JSONDecodeError) as exc:
                        raise RepositoryError(f'{path}: JSON nicht lesbar ({exc})') from exc
                if not isinstance(data, dict):
                        raise RepositoryError(f'{path}: Objekt auf oberster Ebene erwartet')
                return data

        @staticmethod
        def _save(path: Path, payload: dict) -> Path:
                tmp_path = path.with_suffix('.tmp')
                with tmp_path.open('w', encoding='utf-8') as fh:
                        json.dump(payload, fh, ensure_ascii=False, indent=2)
                tmp_path.replace(path)
                return path

        def load_table(self, source: Path, renormalize: bool = False) -> IOTable:
                data = self._load(source)
                try:
                        table = IOTable.from_row(data)
                except (KeyError, TypeError, ValueError) as exc:
                        raise RepositoryError(f'{source}: Tabelle unvollständig ({exc})') from exc
                if renormalize:
                        table = table.renormalized()
                log.info('Tabelle %s geladen: n=%s, Jahr %s', source, table.n, table.year)
                return check_table(table, Path(source))

        def load_deflators(self, source: Path) -> DeflatorVector:
                path = Path(source)
                if path.suffix.lower() == '.csv':
                        return DeflatorVector(p=read_vector(path))
                data = self._load(path)
                if 'deflators' not in data:
                        raise RepositoryError(f'{path}: Eintrag "deflators" fehlt')
                return DeflatorVector.from_row(data)

        def save_observation(self, directory: Path, obs: LinkedObservation) -> dict[str, Path]:
                directory = Path(directory)
                directory.mkdir(parents=True, exist_ok=True)
                written: dict[str, Path] = {}
                for index, table in enumerate((obs.table0, obs.table1)):
                        payload = table.to_dict()
                        if index == 1:
                                payload.update(obs.deflators.to_dict())
                        written[f'period{index}'] = self._save(directory / f'period{index}.json', payload)
                log.info('JSON-Bündel geschrieben: %s', directory)
                return written
