from __future__ import annotations

import argparse

from cesge.utils.settings import (
        APPLICATION,
        DEFAULT_ALPHA,
        DEFAULT_BOOTSTRAP_REPS,
        DEFAULT_DAMPING,
        DEFAULT_MAX_ITER,
        DEFAULT_SEARCH_TRIALS,
        DEFAULT_SEED,
        DEFAULT_SHOCK_FACTOR,
        DEFAULT_SIGMA_MAX,
        DEFAULT_TOL,
        METHOD_CES,
        METHODS,
        parse_float_list,
        parse_range,
)


def _add_output(parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--out', required=True, help='Ausgabeverzeichnis')
        parser.add_argument('--json', dest='write_json', action='store_true', help='JSON-Zwilling je CSV schreiben')
        parser.add_argument('--xlsx', dest='write_xlsx', action='store_true', help='alle Berichte als Arbeitsmappe')


def _add_solver(parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--tol', type=float, default=DEFAULT_TOL, help='Toleranz der Fixpunktiteration')
        parser.add_argument('--max-iter', type=int, default=DEFAULT_MAX_ITER)
        parser.add_argument('--damping', type=float, default=DEFAULT_DAMPING, help='Dämpfung in (0, 1]')


def build_parser() -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
                prog=APPLICATION,
                description='CES-Elastizitäten schätzen und Produktivitätsschocks im allgemeinen Gleichgewicht bewerten.',
        )
        parser.add_argument('-v', '--verbose', action='count', default=0, help='-v INFO, -vv DEBUG')
        commands = parser.add_subparsers(dest='subcommand', required=True)

        estimate = commands.add_parser('estimate', help='Elastizitäten und TFPg aus zwei Perioden schätzen')
        estimate.add_argument('--period0', required=True, help='Manifest des Referenzjahres')
        estimate.add_argument('--period1', required=True, help='Manifest des Zieljahres')
        estimate.add_argument('--deflators', help='Deflatoren (CSV); sonst aus dem Manifest des Zieljahres')
        estimate.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
        estimate.add_argument('--bootstrap-reps', type=int, default=DEFAULT_BOOTSTRAP_REPS)
        estimate.add_argument('--bootstrap-scheme', choices=('pairs', 'residual'), default='pairs')
        estimate.add_argument('--robust', action='store_true', help='HC1-Standardfehler')
        estimate.add_argument('--seed', type=int, default=DEFAULT_SEED)
        estimate.add_argument('--jobs', type=int, default=1, help='parallele Sektorschätzung (joblib)')
        estimate.add_argument('--renormalize', action='store_true', help='a0 = 1 − Spaltensumme setzen')
        estimate.add_argument('--exclude-diagonal', action='store_true', help='Eigenverbrauch a_jj nicht verwenden')
        _add_output(estimate)

        shock = commands.add_parser('shock', help='Produktivitätsschock simulieren')
        shock.add_argument('--economy', required=True, help='Manifest der kalibrierten Tabelle')
        shock.add_argument('--estimates', help='estimates.csv (für ces, ces-all, ces-paper-closed-form)')
        shock.add_argument(
                '--method',
                dest='methods',
                action='append',
                help=f'eine oder mehrere von {", ".join(METHODS)} (wiederholbar oder kommagetrennt; Standard {METHOD_CES})',
        )
        shock.add_argument('--shock', dest='shocks', action='append', help='"sector=<Nr|Bezeichnung>,factor=<x>"')
        shock.add_argument('--renormalize', action='store_true')
        _add_solver(shock)
        _add_output(shock)

        proposition = commands.add_parser('proposition', help='Vorzeichensatz für einheitliches γ prüfen')
        proposition.add_argument('--economy', required=True)
        proposition.add_argument('--gamma-grid', type=parse_float_list)
        proposition.add_argument('--direction', choices=('up', 'down'), default='up')
        proposition.add_argument('--factor', type=float, default=DEFAULT_SHOCK_FACTOR, help='Schockstärke (> 1)')
        proposition.add_argument('--shock', dest='shocks', action='append', help='fester Schock statt Einzelschocks je Sektor')
        proposition.add_argument('--sigma-max', type=float, default=DEFAULT_SIGMA_MAX)
        proposition.add_argument('--search-trials', type=int, default=DEFAULT_SEARCH_TRIALS)
        proposition.add_argument('--seed', type=int, default=DEFAULT_SEED)
        proposition.add_argument('--renormalize', action='store_true')
        _add_output(proposition)

        synth = commands.add_parser('synth', help='synthetisches Datenbündel erzeugen')
        synth.add_argument('--n', type=int, default=50)
        synth.add_argument('--seed', type=int, default=DEFAULT_SEED)
        synth.add_argument('--noise', type=float, default=0.0)
        synth.add_argument('--gamma-range', type=parse_range, help='lo,hi; negative Untergrenze als --gamma-range=-0.5,1 angeben')
        synth.add_argument('--z-range', type=parse_range, help='lo,hi mit lo > 0')
        synth.add_argument('--density', type=float)
        _add_output(synth)
        return parser
