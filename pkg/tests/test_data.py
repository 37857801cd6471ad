from __future__ import annotations

import math

import numpy as np
import pytest

from cesge.data.models import (
        SAMPLE_INSUFFICIENT,
        DeflatorVector,
        IOTable,
        LinkedObservation,
        SectorEstimate,
)
from cesge.data.samples import build_regression_samples
from cesge.utils.settings import RunConfig, parse_shock, resolve_sector, shock_vector
from cesge.utils.validators import RunConfigValidator, TableValidator, ValidationError


def test_valid_one_sector_table_has_no_violations(one_sector):
        assert TableValidator.validate_table(one_sector) == []


def test_negative_coefficient_is_reported():
        table = IOTable(A=[[-0.1]], a0=[1.1], d=[1.0])
        violations = TableValidator.validate_table(table)
        assert 'negative coefficient at (0,0)' in violations


def test_column_sum_violation_names_column():
        table = IOTable(A=[[0.48]], a0=[0.5], d=[1.0])
        violations = TableValidator.validate_table(table)
        assert len(violations) == 1
        assert violations[0].startswith('column 0 shares sum 0.98')


def test_negative_final_demand_is_accepted():
        table = IOTable(A=[[0.5]], a0=[0.5], d=[-3.0])
        assert TableValidator.validate_table(table) == []


def test_table_rejects_non_square_matrix():
        with pytest.raises(ValueError):
                IOTable(A=[[0.1, 0.2]], a0=[0.9], d=[1.0])


def test_default_labels():
        table = IOTable(A=np.zeros((2, 2)), a0=[1.0, 1.0], d=[1.0, 1.0])
        assert table.labels == ('sector_1', 'sector_2')


def test_renormalized_restores_exhaustion():
        table = IOTable(A=[[0.333, 0.5], [0.333, 0.25]], a0=[0.33, 0.25], d=[1.0, 1.0])
        assert TableValidator.validate_table(table)
        assert TableValidator.validate_table(table.renormalized()) == []


def test_deflator_validation(three_sector):
        vector = DeflatorVector(p=[1.0, 0.0, 1.0])
        violations = TableValidator.validate_deflators(vector, three_sector.n)
        assert any('expected 4' in text for text in violations)
        assert 'nonpositive deflator at 1' in violations


def test_observation_with_different_labels_is_rejected(three_sector):
        other = three_sector.copy(labels=('a', 'b', 'c'))
        obs = LinkedObservation(table0=three_sector, table1=other, deflators=DeflatorVector(p=np.ones(4)))
        assert 'sector labels differ between periods' in TableValidator.validate_observation(obs)


def test_static_observation_rows_are_zero(static_observation):
        samples = build_regression_samples(static_observation)
        assert len(samples) == 3
        for sample in samples:
                assert sample.n_obs == 4
                np.testing.assert_array_equal(sample.y, 0.0)
                np.testing.assert_array_equal(sample.x, 0.0)
                assert list(sample.factors) == [0, 1, 2, 3]


def _two_sector_observation(a1_target: float) -> LinkedObservation:
        table0 = IOTable(A=[[0.4, 0.25], [0.2, 0.25]], a0=[0.4, 0.5], d=[1.0, 1.0], year=2000)
        A1 = np.array([[0.4, 0.25], [a1_target, 0.25]])
        table1 = IOTable(A=A1, a0=[1.0 - 0.4 - a1_target, 0.5], d=[1.0, 1.0], year=2005)
        return LinkedObservation(table0=table0, table1=table1, deflators=DeflatorVector(p=[1.0, 1.0, 2.0]))


def test_share_and_price_growth_rows():
        samples = build_regression_samples(_two_sector_observation(0.4))
        rows = {factor: (y, x) for factor, y, x in samples[0].rows}
        y, x = rows[2]
        assert y == pytest.approx(math.log(2.0), abs=1e-15)
        assert x == pytest.approx(math.log(2.0), abs=1e-15)


def test_zero_share_excludes_factor():
        samples = build_regression_samples(_two_sector_observation(0.0))
        assert 2 not in samples[0].factors
        assert samples[0].flag == SAMPLE_INSUFFICIENT
        assert not samples[0].estimable
        assert samples[1].estimable


def test_exclude_diagonal_drops_own_input(static_observation):
        samples = build_regression_samples(static_observation, exclude_diagonal=True)
        for sample in samples:
                assert sample.sector + 1 not in sample.factors
                assert sample.n_obs == 3


def test_estimate_row_uses_one_based_sector():
        estimate = SectorEstimate(sector=4, label='cement', slope=0.5, gamma=0.5, sigma=0.5, accepted_null=False, n_obs=7)
        row = estimate.to_dict()
        assert row['sector'] == 5
        restored = SectorEstimate.from_row({**row, 'stars_slope': float('nan')})
        assert restored.sector == 4
        assert restored.significant
        assert restored.n_obs == 7
        assert restored.stars_slope == ''


def test_parse_shock():
        assert parse_shock('sector=150,factor=2.0') == ('150', 2.0)
        with pytest.raises(ValidationError):
                parse_shock('sector=150')


def test_resolve_sector_by_number_and_label():
        labels = ('agri', 'Ready mixed concrete', 'services')
        assert resolve_sector('2', labels) == 1
        assert resolve_sector('ready mixed concrete', labels) == 1
        with pytest.raises(ValidationError):
                resolve_sector('4', labels)
        with pytest.raises(ValidationError):
                resolve_sector('mining', labels)


def test_shock_vector():
        z = shock_vector([('3', 2.0)], ('a', 'b', 'c'))
        np.testing.assert_array_equal(z, [1.0, 1.0, 2.0])
        with pytest.raises(ValidationError):
                shock_vector([('1', 0.0)], ('a', 'b', 'c'))


def test_run_config_validation():
        ok, errors = RunConfigValidator.validate(RunConfig())
        assert ok and errors == {}
        ok, errors = RunConfigValidator.validate(RunConfig(alpha=1.5, methods=('translog',), damping=0.0))
        assert not ok
        assert set(errors) >= {'alpha', 'method', 'damping'}
