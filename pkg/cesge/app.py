from __future__ import annotations

import logging
import sys
from typing import Optional, Sequence

from cesge.cli.commands import COMMANDS
from cesge.cli.parser import build_parser
from cesge.data.repository import RepositoryError
from cesge.equilibrium.prices import EquilibriumError
from cesge.estimation.ols import EstimationError
from cesge.export.exporters import ExportError
from cesge.utils.settings import RunConfig

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ESTIMATION = 3
EXIT_SOLVER = 4

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def configure_logging(verbosity: int) -> None:
        level = LOG_LEVELS[min(max(verbosity, 0), len(LOG_LEVELS) - 1)]
        logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def main(argv: Optional[Sequence[str]] = None) -> int:
        """Führt einen Unterbefehl aus und liefert den Exit-Code."""

        namespace = build_parser().parse_args(argv)
        configure_logging(namespace.verbose)
        try:
                config = RunConfig.from_namespace(namespace)
                return COMMANDS[config.subcommand](config)
        except EquilibriumError as exc:
                log.error('Löser fehlgeschlagen: %s', exc)
                return EXIT_SOLVER
        except EstimationError as exc:
                log.error('Schätzung nicht möglich: %s', exc)
                return EXIT_ESTIMATION
        except (RepositoryError, ExportError, ValueError) as exc:
                log.error('Eingabefehler: %s', exc)
                return EXIT_INPUT


def run() -> None:
        sys.exit(main())


if __name__ == '__main__':
        run()
