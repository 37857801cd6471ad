from __future__ import annotations

import logging

import numpy as np
import pandas as pd

from cesge.data.csv_repo import read_estimates
from cesge.data.models import IOTable
from cesge.data.repository import create_repository, read_manifest, write_manifest
from cesge.equilibrium.proposition import (
        DIRECTION_DOWN,
        consistent_witnesses,
        proposition_sweep,
        search_sign_witnesses,
)
from cesge.equilibrium.scenario import run_shock
from cesge.estimation.calibration import MODE_ALL, MODE_SIGNIFICANT, summarize_elasticities
from cesge.estimation.pipeline import EstimationRun, estimate_observation
from cesge.export.exporters import export_to_csv, export_to_json, export_to_xlsx, write_report
from cesge.synthetic.generator import (
        SyntheticSpec,
        draw_shock,
        generate_economy,
        simulate_linked_observation,
        truth_frame,
)
from cesge.utils.settings import ESTIMATE_METHODS, RunConfig, shock_vector
from cesge.utils.validators import ValidationError

log = logging.getLogger(__name__)

WITNESS_COLUMNS = ['trial', 'solver', 'shocked_sector', 'sector', 'scs', 'sigma', 'identity_gap', 'consistent']


def _load_table(config: RunConfig, source) -> IOTable:
        return create_repository(source).load_table(source, renormalize=config.renormalize)


def figure_frames(run: EstimationRun) -> dict[str, pd.DataFrame]:
        """Plotfertige Daten: Elastizität gegen P-Wert, CES- gegen Translog-TFPg."""

        elasticity = pd.DataFrame(
                [
                        {
                                'sector': estimate.sector + 1,
                                'label': estimate.label,
                                'sigma': 1.0 - estimate.raw_gamma(),
                                'p_slope': estimate.p_slope,
                                'significant': estimate.significant,
                        }
                        for estimate in run.estimable
                ],
                columns=['sector', 'label', 'sigma', 'p_slope', 'significant'],
        )
        scatter = pd.DataFrame(
                [
                        {
                                'sector': estimate.sector + 1,
                                'label': estimate.label,
                                'tfpg_ces': estimate.tfpg,
                                'tfpg_translog': estimate.tfpg_translog,
                                'tag': 'slope-and-constant' if estimate.p_intercept < run.alpha else 'slope-only',
                        }
                        for estimate in run.estimates
                        if estimate.tfpg_defined
                ],
                columns=['sector', 'label', 'tfpg_ces', 'tfpg_translog', 'tag'],
        )
        return {'figure_elasticity_pvalue': elasticity, 'figure_tfpg_scatter': scatter}


def cmd_estimate(config: RunConfig) -> int:
        obs = create_repository(config.period0).load_observation(
                config.period0,
                config.period1,
                config.deflators,
                renormalize=config.renormalize,
        )
        run = estimate_observation(
                obs,
                alpha=config.alpha,
                reps=config.bootstrap_reps,
                seed=config.seed,
                scheme=config.bootstrap_scheme,
                robust=config.robust,
                exclude_diagonal=config.exclude_diagonal,
                jobs=config.jobs,
        ).require_estimable()
        summary = pd.DataFrame(
                [summarize_elasticities(run.estimates, mode).to_dict() for mode in (MODE_SIGNIFICANT, MODE_ALL)]
        )
        estimates = run.estimates_frame()
        frames = {
                'estimates': estimates,
                'agreement': run.agreement_frame(),
                'elasticity_summary': summary,
                **figure_frames(run),
        }
        appendix = {
                'estimates_by_tfpg': estimates.sort_values('tfpg', ascending=False, na_position='last', kind='mergesort'),
        }
        write_report(frames, config.out, json_twins=config.write_json, xlsx=config.write_xlsx, workbook='estimates.xlsx', appendix=appendix)
        return 0


def cmd_shock(config: RunConfig) -> int:
        table = _load_table(config, config.economy)
        needs_estimates = any(method in ESTIMATE_METHODS for method in config.methods)
        estimates = None
        if needs_estimates:
                if config.estimates is None:
                        raise ValidationError('--estimates wird für CES-Methoden benötigt')
                estimates = read_estimates(config.estimates)
        if not config.shocks:
                log.warning('kein --shock angegeben, z = 1')
        z = shock_vector(config.shocks, table.labels)

        sector_rows: list[dict] = []
        summary_rows: list[dict] = []
        for method in config.methods:
                result = run_shock(
                        table,
                        z,
                        method,
                        estimates=estimates,
                        tol=config.tol,
                        max_iter=config.max_iter,
                        damping=config.damping,
                )
                sector_rows.extend(result.sector_rows(table.labels))
                summary_rows.append(result.summary_row())
        frames = {
                'shock_result': pd.DataFrame(sector_rows),
                'shock_summary': pd.DataFrame(summary_rows),
        }
        write_report(frames, config.out, json_twins=config.write_json, xlsx=config.write_xlsx, workbook='shock.xlsx')
        return 0


def _directed_factor(config: RunConfig) -> float:
        factor = max(config.factor, 1.0 / config.factor)
        return 1.0 / factor if config.direction == DIRECTION_DOWN else factor


def _proposition_shocks(config: RunConfig, table: IOTable) -> list[np.ndarray]:
        if config.shocks:
                return [shock_vector(config.shocks, table.labels)]
        factor = _directed_factor(config)
        shocks = []
        for sector in range(table.n):
                z = np.ones(table.n)
                z[sector] = factor
                shocks.append(z)
        return shocks


def cmd_proposition(config: RunConfig) -> int:
        table = _load_table(config, config.economy)
        if np.any(table.d < 0):
                log.warning('%s negative Einträge in d auf 0 gesetzt', int((table.d < 0).sum()))
                table = table.copy(d=np.clip(table.d, 0.0, None))
        shocks = _proposition_shocks(config, table)
        results = proposition_sweep(table, config.gamma_grid, shocks)
        rows = []
        per_gamma = len(shocks)
        for index, result in enumerate(results):
                z = shocks[index % per_gamma]
                shocked = ';'.join(str(sector + 1) for sector in np.flatnonzero(z != 1.0))
                rows.append({'shocked_sectors': shocked, **result.to_dict()})

        witnesses = search_sign_witnesses(
                table,
                sigma_max=config.sigma_max,
                trials=config.search_trials,
                seed=config.seed,
                factor=_directed_factor(config),
        )
        violations = sum(1 for result in results if not result.holds)
        found = consistent_witnesses(witnesses)
        summary = pd.DataFrame([{
                'cases': len(results),
                'violations': violations,
                'witnesses': len(found),
                'inconsistent_hits': len(witnesses) - len(found),
                'search_result': 'witness found' if found else 'none found',
                'sigma_max': config.sigma_max,
                'trials': config.search_trials,
        }])
        frames = {
                'proposition_report': pd.DataFrame(rows),
                'proposition_witnesses': pd.DataFrame([witness.to_dict() for witness in witnesses], columns=WITNESS_COLUMNS),
                'proposition_summary': summary,
        }
        write_report(frames, config.out, json_twins=config.write_json, xlsx=config.write_xlsx, workbook='proposition.xlsx')
        if violations:
                log.warning('%s von %s Fällen verletzen den Vorzeichensatz', violations, len(results))
        return 0


def cmd_synth(config: RunConfig) -> int:
        spec = SyntheticSpec(
                n=config.n,
                seed=config.seed,
                gamma_range=config.gamma_range,
                z_range=config.z_range,
                density=config.density,
                noise_sd=config.noise,
        )
        economy = generate_economy(spec)
        z = draw_shock(spec)
        obs = simulate_linked_observation(economy, z, noise_sd=spec.noise_sd, seed=spec.seed)
        out = config.out
        written = create_repository().save_observation(out, obs)
        economy_manifest = out / 'economy.manifest'
        write_manifest(economy_manifest, read_manifest(written['period0']))
        truth = truth_frame(economy, z, obs.deflators.p[1:])
        export_to_csv(truth, out / 'truth.csv')
        if config.write_json:
                create_repository(out / 'json' / 'period0.json').save_observation(out / 'json', obs)
                export_to_json(truth, out / 'json' / 'truth.json')
        if config.write_xlsx:
                export_to_xlsx({'truth': truth}, out / 'truth.xlsx')
        log.info('Bündel mit %s Sektoren in %s geschrieben', spec.n, out)
        return 0


COMMANDS = {
        'estimate': cmd_estimate,
        'shock': cmd_shock,
        'proposition': cmd_proposition,
        'synth': cmd_synth,
}
