from __future__ import annotations

import abc
import logging
from pathlib import Path
from typing import Optional

from cesge.utils.validators import TableValidator

from .models import DeflatorVector, IOTable, LinkedObservation

log = logging.getLogger(__name__)

MAX_REPORTED_VIOLATIONS = 10


class RepositoryError(RuntimeError):
        """Fehler beim Lesen oder Schreiben von Datenbündeln."""


def read_manifest(path: Path) -> dict[str, str]:
        """Liest ``key = value``-Zeilen; ``#`` leitet Kommentare ein."""

        path = Path(path)
        try:
                text = path.read_text(encoding='utf-8')
        except OSError as exc:
                raise RepositoryError(f'{path}: Manifest nicht lesbar ({exc})') from exc
        entries: dict[str, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
                line = raw.split('#', 1)[0].strip()
                if not line:
                        continue
                if '=' not in line:
                        raise RepositoryError(f'{path}:{number}: erwartet "key = value"')
                key, value = line.split('=', 1)
                entries[key.strip()] = value.strip().strip('"').strip("'")
        return entries


def write_manifest(path: Path, entries: dict[str, object]) -> Path:
        lines = [f'{key} = {value}' for key, value in entries.items()]
        Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')
        return Path(path)


def resolve_entry(manifest: Path, entries: dict[str, str], key: str) -> Path:
        if key not in entries:
                raise RepositoryError(f'{manifest}: Eintrag "{key}" fehlt')
        target = Path(entries[key])
        return target if target.is_absolute() else Path(manifest).parent / target


def check_table(table: IOTable, source: Path) -> IOTable:
        violations = TableValidator.validate_table(table)
        if violations:
                shown = '; '.join(violations[:MAX_REPORTED_VIOLATIONS])
                more = len(violations) - MAX_REPORTED_VIOLATIONS
                suffix = f' (+{more} weitere)' if more > 0 else ''
                raise RepositoryError(f'{source}: ungültige Tabelle: {shown}{suffix}')
        return table


class AbstractRepository(abc.ABC):
        """Gemeinsame Schnittstelle für den Zugriff auf Tabellen und Deflatoren."""

        @abc.abstractmethod
        def load_table(self, source: Path, renormalize: bool = False) -> IOTable:
                """Lädt eine Tabelle und prüft die Anteilsbuchhaltung."""

        @abc.abstractmethod
        def load_deflators(self, source: Path) -> DeflatorVector:
                """Lädt Deflatoren aus einer Datei oder einem Manifest."""

        @abc.abstractmethod
        def save_observation(
                self,
                directory: Path,
                obs: LinkedObservation,
        ) -> dict[str, Path]:
                """Schreibt ein vollständiges Bündel (beide Perioden, Deflatoren, Manifeste)."""

        def load_observation(
                self,
                period0: Path,
                period1: Path,
                deflators: Optional[Path] = None,
                renormalize: bool = False,
        ) -> LinkedObservation:
                table0 = self.load_table(period0, renormalize=renormalize)
                table1 = self.load_table(period1, renormalize=renormalize)
                vector = self.load_deflators(deflators if deflators is not None else period1)
                obs = LinkedObservation(table0=table0, table1=table1, deflators=vector)
                violations = TableValidator.validate_observation(obs)
                if violations:
                        raise RepositoryError('Verknüpfte Tabellen inkonsistent: ' + '; '.join(violations[:MAX_REPORTED_VIOLATIONS]))
                log.info('Verknüpfte Beobachtung geladen: %s Sektoren, Jahre %s/%s', obs.n, table0.year, table1.year)
                return obs


class RepositoryFactory:
        """Factory zur Auswahl des passenden Backends."""

        def __init__(self, source: Path | None = None) -> None:
                self.source = Path(source) if source is not None else None

        def create(self) -> AbstractRepository:
                """JSON-Bündel für ``.json``, sonst Manifest plus CSV-Dateien."""

                if self.source is not None and self.source.suffix.lower() == '.json':
                        from .json_repo import JSONRepository

                        log.info('JSON-Backend gewählt: %s', self.source)
                        return JSONRepository()
                from .csv_repo import CSVRepository

                return CSVRepository()


def create_repository(source: Path | None = None) -> AbstractRepository:
        """Convenience-Funktion für Module außerhalb des Datenpakets."""

        return RepositoryFactory(source).create()
