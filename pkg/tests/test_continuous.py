import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from twostage import continuous, core
from twostage.errors import DomainError
from twostage.params import DemandDensity, ModelParams
from twostage.search import is_unimodal

from reference_values import CONTINUOUS

BASE = ModelParams(alpha=0.1, gamma=3.0)


def _direct_profit(p, theta, price1, price2):
    """Stage profits by numerical integration of the raw integrand."""
    def stage(price, t0, t1):
        return quad(lambda t: price ** (-p.gamma) * (price - p.c * math.exp(-p.alpha * t)),
                    t0, t1, epsabs=1e-14, epsrel=1e-13)[0]
    return stage(price1, 0.0, theta) + stage(price2, theta, 1.0)


class TestPrices:
    def test_reference_point(self):
        p1, p2 = continuous.optimal_prices_given_theta(BASE, 0.50833)
        assert p1 == pytest.approx(1.4625, abs=1e-4)
        assert p2 == pytest.approx(1.3912, abs=1e-4)

    def test_no_learning_limit(self):
        p = ModelParams(alpha=0.0, gamma=3.0)
        assert continuous.optimal_prices_given_theta(p, 0.3) == (1.5, 1.5)

    def test_grid_argmax_per_stage(self):
        p1, p2 = continuous.optimal_prices_given_theta(BASE, 0.5)
        grid = np.arange(1.0, 2.0, 1e-4)
        m1, d1, m2, d2 = continuous.stage_integrals(BASE, 0.5)
        g1 = grid[np.argmax(continuous.stage_profit(grid, m1, d1, 1.0, 3.0))]
        g2 = grid[np.argmax(continuous.stage_profit(grid, m2, d2, 1.0, 3.0))]
        assert abs(g1 - p1) <= 1e-4
        assert abs(g2 - p2) <= 1e-4

    @pytest.mark.parametrize("theta", [0.0, 1.0, -0.2])
    def test_domain(self, theta):
        with pytest.raises(DomainError):
            continuous.optimal_prices_given_theta(BASE, theta)

    @given(st.floats(0.01, 2.0), st.floats(1.05, 8.0), st.floats(0.01, 0.99))
    def test_markdown(self, a, g, theta):
        p1, p2 = continuous.optimal_prices_given_theta(ModelParams(alpha=a, gamma=g), theta)
        assert p1 > p2

    def test_truncnorm_prices_use_first_order_structure(self):
        p = BASE.replace(density=DemandDensity.truncated_normal())
        m1, d1, m2, d2 = continuous.stage_integrals(p, 0.4)
        assert continuous.optimal_prices_given_theta(p, 0.4) == pytest.approx(
            (1.5 * d1 / m1, 1.5 * d2 / m2))


class TestProfit:
    def test_reference_value(self):
        assert continuous.total_profit(BASE, 0.50833) == pytest.approx(0.1639, abs=5e-5)

    def test_cost_scaling(self):
        base = continuous.total_profit(BASE, 0.50833)
        assert continuous.total_profit(BASE.replace(c=2.0), 0.50833) == pytest.approx(base / 4)

    @settings(max_examples=50)
    @given(st.floats(0.01, 2.0), st.floats(1.05, 8.0), st.floats(0.02, 0.98))
    def test_closed_form_matches_direct_integral(self, a, g, theta):
        p = ModelParams(alpha=a, gamma=g)
        p1, p2 = continuous.optimal_prices_given_theta(p, theta)
        direct = _direct_profit(p, theta, p1, p2)
        assert continuous.total_profit(p, theta) == pytest.approx(direct, rel=1e-10)

    def test_stage_split(self):
        sol = continuous.solve_theta_star(BASE)
        assert sol.profit == pytest.approx(sol.profit_stage1 + sol.profit_stage2, abs=1e-12)

    @settings(max_examples=30)
    @given(st.floats(0.01, 2.0), st.floats(1.05, 8.0))
    def test_unimodal_in_theta(self, a, g):
        grid = np.arange(1, 1000) / 1000
        assert is_unimodal(continuous.reduced_profit(grid, a, g))


class TestThetaStar:
    @pytest.mark.parametrize("key", sorted(CONTINUOUS))
    def test_reference_values(self, key):
        theta, p1, p2, profit = CONTINUOUS[key]
        sol = continuous.solve_theta_star(ModelParams(alpha=key[0], gamma=key[1]))
        assert sol.theta == pytest.approx(theta, abs=1e-11)
        assert sol.p1 == pytest.approx(p1, rel=1e-11)
        assert sol.p2 == pytest.approx(p2, rel=1e-11)
        assert sol.profit == pytest.approx(profit, rel=1e-11)

    def test_root_tolerance(self):
        sol = continuous.solve_theta_star(BASE)
        assert abs(core.z_fn(sol.theta, 0.1, 3.0, normalized=True)) < 1e-10

    def test_fine_grid_argmax(self):
        p = ModelParams(alpha=0.5, gamma=3.0)
        grid = np.arange(1, 100000) * 1e-5
        best = grid[np.argmax(continuous.reduced_profit(grid, 0.5, 3.0))]
        assert abs(continuous.solve_theta_star(p).theta - best) <= 2e-5

    def test_theta_nondecreasing_in_alpha(self):
        thetas = [continuous.solve_theta_star(BASE.replace(alpha=a)).theta
                  for a in (0.05, 0.1, 0.2, 0.4)]
        assert np.all(np.diff(thetas) >= 0)

    def test_requires_learning(self):
        with pytest.raises(DomainError, match="alpha"):
            continuous.solve_theta_star(BASE.replace(alpha=0.0))

    @settings(max_examples=30)
    @given(st.floats(0.01, 2.0), st.floats(1.05, 8.0), st.floats(0.02, 0.98))
    def test_slope_sign_matches_z(self, a, g, x):
        root = continuous.solve_theta_star(ModelParams(alpha=a, gamma=g)).theta
        if abs(x - root) < 1e-3:
            return
        h = 1e-6
        slope = (continuous.reduced_profit(x + h, a, g) - continuous.reduced_profit(x - h, a, g))
        assert np.sign(slope) == np.sign(core.z_fn(x, a, g))

    def test_truncnorm_solution_is_interior_optimum(self):
        p = BASE.replace(density=DemandDensity.truncated_normal())
        sol = continuous.solve_theta_star(p)
        for dt in (-1e-3, 1e-3):
            assert continuous.total_profit(p, sol.theta + dt) < sol.profit


class TestSweep:
    def test_alpha_prices_decrease(self):
        rows = continuous.sweep_observations(BASE, "alpha", [0.05, 0.1, 0.2])
        assert np.all(np.diff([r.p1 for r in rows]) < 0)
        assert np.all(np.diff([r.p2 for r in rows]) < 0)

    def test_gamma_profit_decreases(self):
        rows = continuous.sweep_observations(BASE, "gamma", [2.0, 3.0, 5.0])
        assert np.all(np.diff([r.profit for r in rows]) < 0)

    def test_theta_independent_of_cost(self):
        rows = continuous.sweep_observations(BASE, "c", [1.0, 2.0])
        assert rows[0].theta == rows[1].theta

    def test_bad_rows_are_marked(self):
        rows = continuous.sweep_observations(BASE, "gamma", [0.5, 3.0])
        assert not rows[0].ok and "gamma" in rows[0].error
        assert rows[1].ok

    def test_unknown_axis(self):
        with pytest.raises(DomainError):
            continuous.sweep_observations(BASE, "beta", [0.5])
