from __future__ import annotations

import numpy as np
import pytest

from cesge.data.models import Economy, IOTable
from cesge.equilibrium.prices import (
        NonConvergence,
        SingularSystem,
        ZeroGamma,
        gross_output,
        neumann_series,
        price_residual,
        solve_prices_closed_form,
        solve_prices_cobb_douglas,
        solve_prices_fixed_point,
        solve_prices_leontief,
)


def test_unit_shock_keeps_prices_at_one(make_economy):
        economy = make_economy(n=8, seed=1)
        solution = solve_prices_fixed_point(economy, np.ones(8))
        np.testing.assert_allclose(solution.pi, 1.0, atol=1e-12)


def test_one_sector_limits(one_sector):
        z = np.array([2.0])
        leontief = Economy.uniform(one_sector, 1.0)
        cobb_douglas = Economy.uniform(one_sector, 0.0)
        assert solve_prices_leontief(leontief, z).pi[0] == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert solve_prices_cobb_douglas(cobb_douglas, z).pi[0] == pytest.approx(0.25, abs=1e-15)
        assert solve_prices_fixed_point(leontief, z).pi[0] == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert solve_prices_fixed_point(cobb_douglas, z).pi[0] == pytest.approx(0.25, abs=1e-12)


def test_one_sector_ces_closed_form(one_sector):
        economy = Economy.uniform(one_sector, 0.5)
        expected = (0.5 / (np.sqrt(2.0) - 0.5)) ** 2
        assert solve_prices_closed_form(economy, np.array([2.0])).pi[0] == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize('gamma', [0.25, 0.5, 0.75, 1.0, 1.8])
def test_fixed_point_matches_closed_form_for_uniform_gamma(make_economy, gamma):
        for seed in range(20):
                economy = make_economy(n=30, seed=seed, gamma=gamma)
                z = np.random.default_rng(seed).uniform(0.9, 1.5, size=30)
                fixed = solve_prices_fixed_point(economy, z)
                closed = solve_prices_closed_form(economy, z)
                np.testing.assert_allclose(fixed.pi, closed.pi, atol=1e-10)
                assert closed.residual < 1e-12


def test_exact_zero_gamma_matches_cobb_douglas(make_economy):
        economy = make_economy(n=10, seed=3, gamma=0.0)
        z = np.random.default_rng(3).uniform(0.9, 1.5, size=10)
        fixed = solve_prices_fixed_point(economy, z, tol=1e-14)
        np.testing.assert_allclose(fixed.pi, solve_prices_cobb_douglas(economy, z).pi, atol=1e-12)


def test_small_gamma_approaches_cobb_douglas(make_economy):
        economy = make_economy(n=10, seed=3, gamma=1e-7)
        z = np.random.default_rng(3).uniform(0.9, 1.5, size=10)
        cobb_douglas = solve_prices_cobb_douglas(economy.with_gamma(0.0), z).pi
        np.testing.assert_allclose(solve_prices_fixed_point(economy, z).pi, cobb_douglas, atol=1e-5)


def test_heterogeneous_fixed_point_solves_unit_costs(make_economy):
        economy = make_economy(n=12, seed=8, gamma_range=(-0.5, 1.0))
        z = np.random.default_rng(8).uniform(0.9, 1.5, size=12)
        solution = solve_prices_fixed_point(economy, z)
        assert price_residual(economy, z, solution.pi) < 1e-10
        assert solution.iterations > 0


def test_price_direction_follows_shock(make_economy):
        economy = make_economy(n=8, seed=2)
        up = np.full(8, 1.0)
        up[3] = 1.4
        down = np.full(8, 1.0)
        down[3] = 0.9
        assert np.all(solve_prices_fixed_point(economy, up).pi <= 1.0 + 1e-12)
        assert np.all(solve_prices_fixed_point(economy, down).pi >= 1.0 - 1e-12)


def test_damping_reaches_same_prices(make_economy):
        economy = make_economy(n=8, seed=5)
        z = np.random.default_rng(5).uniform(0.9, 1.5, size=8)
        plain = solve_prices_fixed_point(economy, z)
        damped = solve_prices_fixed_point(economy, z, damping=0.5)
        np.testing.assert_allclose(damped.pi, plain.pi, atol=1e-10)
        assert damped.iterations > plain.iterations


def test_neumann_series_matches_inverse(make_economy):
        economy = make_economy(n=6, seed=4, gamma=0.7)
        z = np.random.default_rng(4).uniform(1.0, 1.5, size=6)
        series, terms = neumann_series(economy.A, z, economy.gamma)
        expected = np.linalg.inv(np.diag(np.power(z, 0.7)) - economy.A)
        np.testing.assert_allclose(series, expected, atol=1e-10)
        assert terms > 1


def test_neumann_series_for_scalar_shock(make_economy):
        economy = make_economy(n=5, seed=7)
        z = np.full(5, 1.2)
        series, _ = neumann_series(economy.A, z, 0.5)
        scale = 1.2 ** -0.5
        expected = sum(np.linalg.matrix_power(economy.A, k) * scale ** (k + 1) for k in range(200))
        np.testing.assert_allclose(series, expected, atol=1e-10)


def test_closed_form_rejects_zero_gamma(one_sector):
        with pytest.raises(ZeroGamma):
                solve_prices_closed_form(Economy.uniform(one_sector, 0.0), np.array([2.0]))


def test_strong_negative_shock_has_no_nonnegative_inverse():
        economy = Economy.uniform(IOTable(A=[[0.9]], a0=[0.1], d=[1.0]), 1.0)
        with pytest.raises(SingularSystem):
                solve_prices_leontief(economy, np.array([0.5]))
        with pytest.raises(SingularSystem):
                neumann_series(economy.A, np.array([0.5]), 1.0)


def test_iteration_limit(make_economy):
        economy = make_economy(n=6, seed=0)
        z = np.full(6, 1.3)
        with pytest.raises(NonConvergence):
                solve_prices_fixed_point(economy, z, max_iter=2)


@pytest.mark.parametrize('z', [[0.0], [-1.0], [1.0, 1.0], [np.inf]])
def test_invalid_shock_vector(one_sector, z):
        with pytest.raises(ValueError):
                solve_prices_fixed_point(Economy.uniform(one_sector, 0.5), np.array(z))


def test_gross_output(one_sector, three_sector):
        np.testing.assert_allclose(gross_output(one_sector), [2.0])
        x = gross_output(three_sector)
        np.testing.assert_allclose(x - three_sector.A @ x, three_sector.d, atol=1e-12)
