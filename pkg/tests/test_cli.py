from __future__ import annotations

import json

import pandas as pd
import pytest

from cesge.app import EXIT_ESTIMATION, EXIT_INPUT, EXIT_OK, EXIT_SOLVER, main


@pytest.fixture
def bundle(tmp_path):
        out = tmp_path / 'bundle'
        assert main(['synth', '--n', '8', '--seed', '1', '--z-range', '0.9,1.5', '--out', str(out)]) == EXIT_OK
        return out


def _estimate(bundle, out, *extra: str) -> int:
        return main([
                'estimate',
                '--period0', str(bundle / 'period0.manifest'),
                '--period1', str(bundle / 'period1.manifest'),
                '--bootstrap-reps', '50',
                '--out', str(out),
                *extra,
        ])


def test_synth_writes_bundle(bundle):
        for name in ('period0.manifest', 'period1.manifest', 'economy.manifest', 'labels.csv', 'deflators.csv', 'truth.csv'):
                assert (bundle / name).exists(), name
        truth = pd.read_csv(bundle / 'truth.csv')
        assert list(truth['sector']) == list(range(1, 9))
        assert truth['z'].between(0.9, 1.5).all()


def test_estimate_shock_proposition_chain(bundle, tmp_path):
        estimates_dir = tmp_path / 'estimates'
        assert _estimate(bundle, estimates_dir, '--json', '--xlsx') == EXIT_OK
        estimates = pd.read_csv(estimates_dir / 'estimates.csv')
        truth = pd.read_csv(bundle / 'truth.csv')
        significant = estimates[~estimates['accepted_null']]
        merged = significant.merge(truth, on='sector', suffixes=('', '_true'))
        assert (merged['gamma'] - merged['gamma_true']).abs().max() < 1e-8
        assert (merged['tfpg'] - merged['ln_z']).abs().max() < 1e-8
        agreement = pd.read_csv(estimates_dir / 'agreement.csv')
        assert list(agreement['subset']) == ['slope', 'slope-only', 'slope-and-constant', 'bootstrap']
        summary = pd.read_csv(estimates_dir / 'elasticity_summary.csv')
        assert list(summary['mode']) == ['significant-only', 'all']
        for name in ('figure_elasticity_pvalue.csv', 'figure_tfpg_scatter.csv', 'estimates.json', 'estimates_by_tfpg.json'):
                assert (estimates_dir / name).exists(), name
        with (estimates_dir / 'estimates.json').open(encoding='utf-8') as fh:
                assert len(json.load(fh)) == 8
        sheets = pd.read_excel(estimates_dir / 'estimates.xlsx', sheet_name=None)
        assert {'estimates', 'agreement', 'estimates_by_tfpg'} <= set(sheets)

        shock_dir = tmp_path / 'shock'
        assert main([
                'shock',
                '--economy', str(bundle / 'economy.manifest'),
                '--estimates', str(estimates_dir / 'estimates.csv'),
                '--method', 'ces,leontief',
                '--method', 'cobb-douglas',
                '--shock', 'sector=2,factor=1.2',
                '--out', str(shock_dir),
        ]) == EXIT_OK
        summary = pd.read_csv(shock_dir / 'shock_summary.csv')
        assert list(summary['method']) == ['ces', 'leontief', 'cobb-douglas']
        assert (summary['scs_total'] > 0).all()
        assert (summary['identity_gap'] < 1e-6).all()
        result = pd.read_csv(shock_dir / 'shock_result.csv')
        assert len(result) == 24
        assert set(result.loc[result['z'] != 1.0, 'sector']) == {2}

        proposition_dir = tmp_path / 'proposition'
        assert main([
                'proposition',
                '--economy', str(bundle / 'economy.manifest'),
                '--gamma-grid', '0,0.5,1',
                '--search-trials', '10',
                '--out', str(proposition_dir),
        ]) == EXIT_OK
        report = pd.read_csv(proposition_dir / 'proposition_report.csv')
        assert len(report) == 24
        assert report['holds'].all()
        summary = pd.read_csv(proposition_dir / 'proposition_summary.csv')
        assert summary.loc[0, 'cases'] == 24
        assert summary.loc[0, 'violations'] == 0
        assert summary.loc[0, 'search_result'] == 'none found'
        assert summary.loc[0, 'witnesses'] == 0
        witnesses = pd.read_csv(proposition_dir / 'proposition_witnesses.csv')
        assert summary.loc[0, 'inconsistent_hits'] == len(witnesses)
        assert not witnesses['consistent'].any()
        assert (proposition_dir / 'proposition_witnesses.csv').exists()


def test_runs_are_byte_identical(tmp_path):
        for name in ('first', 'second'):
                assert main(['synth', '--n', '6', '--seed', '3', '--noise', '0.01', '--z-range', '0.9,1.5', '--out', str(tmp_path / name)]) == EXIT_OK
                assert _estimate(tmp_path / name, tmp_path / f'{name}_estimates', '--seed', '2') == EXIT_OK
        for name in ('period1.manifest', 'deflators.csv', 'truth.csv'):
                assert (tmp_path / 'first' / name).read_bytes() == (tmp_path / 'second' / name).read_bytes()
        first = (tmp_path / 'first_estimates' / 'estimates.csv').read_bytes()
        assert first == (tmp_path / 'second_estimates' / 'estimates.csv').read_bytes()


def test_synth_json_and_xlsx(tmp_path):
        out = tmp_path / 'bundle'
        assert main(['synth', '--n', '4', '--seed', '2', '--z-range', '0.9,1.5', '--json', '--xlsx', '--out', str(out)]) == EXIT_OK
        for name in ('json/period0.json', 'json/period1.json', 'json/truth.json', 'truth.xlsx'):
                assert (out / name).exists(), name
        assert _estimate(out, tmp_path / 'estimates', '--bootstrap-reps', '0') == EXIT_OK
        json_run = main([
                'estimate',
                '--period0', str(out / 'json' / 'period0.json'),
                '--period1', str(out / 'json' / 'period1.json'),
                '--bootstrap-reps', '0',
                '--out', str(tmp_path / 'json_estimates'),
        ])
        assert json_run == EXIT_OK
        csv_estimates = pd.read_csv(tmp_path / 'estimates' / 'estimates.csv')
        json_estimates = pd.read_csv(tmp_path / 'json_estimates' / 'estimates.csv')
        pd.testing.assert_series_equal(csv_estimates['gamma'], json_estimates['gamma'])


def test_missing_deflators_is_an_input_error(bundle, tmp_path):
        (bundle / 'deflators.csv').unlink()
        assert _estimate(bundle, tmp_path / 'estimates') == EXIT_INPUT


def test_ces_without_estimates_is_an_input_error(bundle, tmp_path):
        code = main(['shock', '--economy', str(bundle / 'economy.manifest'), '--shock', 'sector=1,factor=2', '--out', str(tmp_path / 'shock')])
        assert code == EXIT_INPUT


def test_identical_periods_cannot_be_estimated(bundle, tmp_path):
        ones = tmp_path / 'ones.csv'
        pd.DataFrame({'p': [1.0] * 9}).to_csv(ones, index=False)
        code = main([
                'estimate',
                '--period0', str(bundle / 'period0.manifest'),
                '--period1', str(bundle / 'period0.manifest'),
                '--deflators', str(ones),
                '--out', str(tmp_path / 'estimates'),
        ])
        assert code == EXIT_ESTIMATION


def test_solver_failure_exit_code(tmp_path):
        out = tmp_path / 'single'
        assert main(['synth', '--n', '1', '--z-range', '1,1.5', '--out', str(out)]) == EXIT_OK
        code = main([
                'shock',
                '--economy', str(out / 'economy.manifest'),
                '--method', 'leontief',
                '--shock', 'sector=1,factor=0.25',
                '--out', str(tmp_path / 'shock'),
        ])
        assert code == EXIT_SOLVER


def test_negative_gamma_range_needs_equals_form(tmp_path):
        out = tmp_path / 'bundle'
        assert main(['synth', '--n', '6', '--gamma-range=-0.5,1', '--z-range', '0.9,1.5', '--out', str(out)]) == EXIT_OK
        truth = pd.read_csv(out / 'truth.csv')
        assert truth['gamma'].between(-0.5, 1.0).all()
        with pytest.raises(SystemExit):
                main(['synth', '--gamma-range', '-0.5,1', '--out', str(tmp_path / 'rejected')])
