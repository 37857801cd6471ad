from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Mapping

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
SHEET_NAME_LIMIT = 31


class ExportError(RuntimeError):
        """Fehler beim Exportieren der Berichte."""


def frame_to_dicts(frame: pd.DataFrame) -> list[dict]:
        return frame.astype(object).where(frame.notna(), None).to_dict(orient='records')


def _json_default(value: object) -> object:
        if isinstance(value, np.generic):
                return value.item()
        if isinstance(value, Path):
                return str(value)
        raise TypeError(f'{type(value).__name__} nicht serialisierbar')


def export_to_csv(frame: pd.DataFrame, path: Path) -> Path:
        try:
                frame.to_csv(Path(path), index=False, encoding='utf-8', float_format=FLOAT_FORMAT)
        except OSError as exc:
                raise ExportError(f'{path}: {exc}') from exc
        return Path(path)


def export_to_json(frame: pd.DataFrame | list | dict, path: Path) -> Path:
        payload = frame_to_dicts(frame) if isinstance(frame, pd.DataFrame) else frame
        try:
                with Path(path).open('w', encoding='utf-8') as fh:
                        json.dump(payload, fh, ensure_ascii=False, indent=2, default=_json_default)
        except OSError as exc:
                raise ExportError(f'{path}: {exc}') from exc
        return Path(path)


def export_to_xlsx(frames: Mapping[str, pd.DataFrame], path: Path) -> Path:
        """Alle Tabellen in eine Arbeitsmappe, ein Blatt je Bericht."""

        try:
                with pd.ExcelWriter(Path(path), engine='openpyxl') as writer:
                        for name, frame in frames.items():
                                frame.to_excel(writer, index=False, sheet_name=name[:SHEET_NAME_LIMIT])
        except OSError as exc:
                raise ExportError(f'{path}: {exc}') from exc
        return Path(path)


def write_report(
        frames: Mapping[str, pd.DataFrame],
        out_dir: Path,
        json_twins: bool = False,
        xlsx: bool = False,
        workbook: str = 'report.xlsx',
        appendix: Mapping[str, pd.DataFrame] | None = None,
) -> list[Path]:
        """Schreibt ``<name>.csv`` je Tabelle, optional JSON-Zwillinge und eine Arbeitsmappe.

        ``appendix`` enthält zusätzliche Blätter, die nur in XLSX/JSON erscheinen.
        """

        out_dir = Path(out_dir)
        try:
                out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
                raise ExportError(f'{out_dir}: {exc}') from exc
        written = [export_to_csv(frame, out_dir / f'{name}.csv') for name, frame in frames.items()]
        extra = dict(appendix or {})
        if json_twins:
                for name, frame in {**frames, **extra}.items():
                        written.append(export_to_json(frame, out_dir / f'{name}.json'))
        if xlsx:
                written.append(export_to_xlsx({**frames, **extra}, out_dir / workbook))
        log.info('%s Dateien nach %s geschrieben', len(written), out_dir)
        return written
