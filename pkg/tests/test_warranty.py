from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twostage import core, warranty, wom
from twostage.errors import DomainError, InfeasibleError
from twostage.params import table2_params
from twostage.search import is_unimodal

from reference_values import WARRANTY_CONTINUOUS, WARRANTY_WOM

T2 = table2_params()
T25 = table2_params(n_periods=25)


class TestPurchaseProbability:
    @pytest.mark.parametrize("pw,expected", [(0.0, 1.0), (0.2, 0.0), (0.1092, 0.454)])
    def test_values(self, pw, expected):
        assert warranty.warranty_purchase_prob(pw, 5.0) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("pw", [-1e-9, 0.2001])
    def test_domain(self, pw):
        with pytest.raises(DomainError):
            warranty.warranty_purchase_prob(pw, 5.0)


class TestClaims:
    def test_no_failures(self):
        p = T2.replace(f0=0.0)
        assert warranty.expected_claims(p, 1.4, 1.3, 102, 0.1) == 0.0

    def test_no_buyers(self):
        assert warranty.expected_claims(T2, 1.4, 1.3, 102, 0.2) == 0.0

    def test_compositional(self):
        sol = warranty.solve_joint(T2)
        path = core.wom_path_with_warranty(T2, sol.p_w).values[1:]
        mass, _ = core.period_masses(T2.density, T2.n_periods, T2.alpha)
        demand = (1 + path - T2.rm) * mass
        M = sol.m_star
        q = demand[:M].sum() / sol.p1**3 + demand[M:].sum() / sol.p2**3
        assert sol.expected_claims == pytest.approx(sol.purchase_prob * T2.f0 * q, rel=1e-12)


class TestJointProfit:
    def test_zero_margin_is_price_neutral(self):
        pw = T2.f0 * T2.cw
        assert warranty.warranty_margin(T2, pw) == 0.0
        got = warranty.joint_prices(T2, 102, pw, use_wom=False)
        assert got == pytest.approx(wom.discrete_prices(T2.replace(r0=T2.rm), 102), rel=1e-14)

    def test_published_prices(self):
        p1, p2 = warranty.joint_prices(T2, 102, 0.1092)
        assert p1 == pytest.approx(1.4012, rel=1e-3)
        assert p2 == pytest.approx(1.3300, rel=1e-3)

    def test_split(self):
        total, sales, warr = warranty.joint_profit(T2, 102, 0.1092)
        assert total == pytest.approx(sales + warr, abs=1e-12)
        assert warr > 0

    def test_nonpositive_price_is_infeasible(self):
        p = T2.replace(f0=0.0, d=0.01)
        with pytest.raises(InfeasibleError, match="nonpositive"):
            warranty.joint_prices(p, 102, 50.0)

    def test_infeasible_region_is_skipped(self):
        p = T2.replace(f0=0.0, d=0.01, n_periods=25)
        sol = warranty.solve_joint(p)
        assert sol.p1 > 0 and sol.p2 > 0
        assert 0.0 <= sol.p_w <= 100.0

    @settings(max_examples=40)
    @given(st.floats(0.0, 0.2), st.integers(1, 24), st.floats(0.01, 1.0), st.floats(1.1, 6.0))
    def test_stationarity(self, pw, M, a, g):
        p = T25.replace(alpha=a, gamma=g)
        prof = wom.stage_profile(p, warranty.warranty_weights(p, pw))
        m = warranty.warranty_margin(p, pw)
        k = M - 1
        for mass, disc in ((prof.mass1[k], prof.disc1[k]), (prof.mass2[k], prof.disc2[k])):
            price = wom.stage_prices(p, mass, disc, m)
            f = lambda q: q ** (-g) * ((q + m) * mass - disc)  # noqa: E731
            h = 1e-6 * price
            slope = (f(price + h) - f(price - h)) / (2 * h)
            assert abs(slope) * price / abs(f(price)) < 1e-6


class TestSolveJoint:
    @pytest.mark.parametrize("n", sorted(WARRANTY_WOM))
    def test_reference(self, n):
        M, pw, p1, p2, profit = WARRANTY_WOM[n]
        sol = warranty.solve_joint(table2_params(n_periods=n))
        assert sol.m_star == M
        assert sol.p_w == pytest.approx(pw, abs=1e-7)
        assert (sol.p1, sol.p2) == pytest.approx((p1, p2), rel=1e-7)
        assert sol.profit_total == pytest.approx(profit, rel=1e-12)
        assert sol.profit_total == pytest.approx(sol.profit_sales + sol.profit_warranty, abs=1e-12)

    def test_published_case_iv(self):
        sol = warranty.solve_joint(T25)
        assert sol.p_w == pytest.approx(0.1033, abs=2e-3)
        assert sol.profit_total == pytest.approx(0.1767, rel=0.01)
        assert sol.theta_fraction == Fraction(13, 25) and sol.p1 > sol.p2

    def test_published_finer_grid(self):
        sol = warranty.solve_joint(T2)
        assert sol.p_w == pytest.approx(0.1092, abs=1e-4)
        assert sol.m_star == 102

    def test_without_wom(self):
        sol = warranty.solve_joint(T2, use_wom=False)
        assert 0.108 <= sol.p_w <= 0.111
        assert sol.m_star == 102
        assert sol.profit_total == pytest.approx(0.1788, rel=1e-3)

    def test_profit_curve_unimodal_in_warranty_price(self):
        grid = np.linspace(0.0, 0.2, 101)
        assert is_unimodal([warranty.best_profit_at(T2, pw) for pw in grid])

    def test_prohibitive_sensitivity_pushes_price_down(self):
        assert warranty.solve_joint(T25.replace(d=50.0)).p_w < 0.02

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.02, 1.0), st.floats(1.5, 6.0), st.floats(1.0, 20.0), st.floats(0.0, 0.5))
    def test_price_bounds(self, a, g, d, f0):
        p = T25.replace(alpha=a, gamma=g, d=d, f0=f0)
        sol = warranty.solve_joint(p)
        assert 0.0 <= sol.p_w <= 1.0 / d
        assert 0.0 <= sol.purchase_prob <= 1.0
        assert sol.p1 > sol.p2


class TestContinuousWarranty:
    def test_reference(self):
        pw, theta, p1, p2, profit = WARRANTY_CONTINUOUS
        sol = warranty.solve_warranty_continuous(T2)
        assert sol.p_w == pytest.approx(pw, abs=1e-7)
        assert sol.theta == pytest.approx(theta, abs=1e-6)
        assert (sol.p1, sol.p2) == pytest.approx((p1, p2), rel=1e-6)
        assert sol.profit_total == pytest.approx(profit, rel=1e-12)

    def test_published_case_iii(self):
        sol = warranty.solve_warranty_continuous(T2)
        assert sol.p_w == pytest.approx(0.1100, abs=1e-4)
        assert sol.theta == pytest.approx(0.50908, abs=1e-5)
        assert sol.p1 == pytest.approx(1.4017, abs=1e-4)
        assert sol.p2 == pytest.approx(1.3304, abs=1e-4)
        assert sol.profit_total == pytest.approx(0.1788, abs=1e-4)


@pytest.fixture(scope="module")
def rows():
    return {r.case: r for r in warranty.case_comparison(T25, r0_ue=0.7)}


class TestCaseComparison:
    def test_labels(self, rows):
        assert tuple(rows) == warranty.CASE_LABELS

    def test_percentages(self, rows):
        assert rows["I"].pct_of_case_i == 100.0
        assert rows["III"].pct_of_case_i == pytest.approx(109.1, abs=0.05)
        assert rows["II-UE"].pct_of_case_i < 100.0 < rows["II-OE"].pct_of_case_i

    def test_estimation_direction_barely_matters_with_warranty(self, rows):
        a, b = rows["IV-OE"].profit, rows["IV-UE"].profit
        assert abs(a - b) / a < 5e-3

    def test_uplift(self, rows):
        assert 0.07 <= rows["III"].profit / rows["I"].profit - 1 <= 0.12
        assert rows["IV-OE"].profit > rows["I"].profit

    def test_requires_warranty_fields(self):
        with pytest.raises(DomainError, match="warranty"):
            warranty.case_comparison(T2.replace(f0=None), 0.7)


class TestSweeps:
    def test_markdown_grows_with_learning(self):
        rows = warranty.sweep_warranty(T25, "alpha", [0.05, 0.1, 0.2, 0.4])
        assert np.all(np.diff([r.markdown for r in rows]) > 0)
        assert np.all(np.diff([r.markdown_w for r in rows]) > 0)

    def test_warranty_gap_grows_with_elasticity(self):
        rows = warranty.sweep_warranty(T25, "gamma", [2.0, 3.0, 4.0, 5.0])
        gaps = [r.profit_gap for r in rows]
        assert min(gaps) > 0 and np.all(np.diff(gaps) > 0)

    @pytest.mark.parametrize("axis,grid", [("alpha", [0.05, 0.2, 0.4]), ("gamma", [2.0, 3.0, 5.0])])
    def test_warranty_lowers_prices(self, axis, grid):
        for r in warranty.sweep_warranty(T25, axis, grid):
            assert r.p1_w <= r.p1 and r.p2_w <= r.p2

    def test_warranty_price_flat_in_initial_perception(self):
        rows = warranty.sweep_warranty(T25, "r0", [0.5, 0.7, 0.8, 0.95])
        pws = np.array([r.p_w for r in rows])
        assert np.all(np.diff(pws) >= -1e-9)
        assert np.ptp(pws) < 1e-8

    def test_errors_are_marked(self):
        rows = warranty.sweep_warranty(T25, "gamma", [1.0, 3.0])
        assert not rows[0].ok and rows[1].ok

    def test_without_wom(self):
        rows = warranty.sweep_warranty(T2, "alpha", [0.1], use_wom=False)
        assert rows[0].p_w == pytest.approx(0.11, abs=1e-7)
        assert rows[0].profit == pytest.approx(0.1639, abs=1e-4)
