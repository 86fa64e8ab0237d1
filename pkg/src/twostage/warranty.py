"""Joint pricing of the product and an extended warranty.

The warranty price p_w shifts the pre-launch reliability perception,
determines the purchase probability 1 - d*p_w, and adds a per-unit margin
(1 - d*p_w)(p_w - f0*cw) that enters each stage's first-order condition
like a cost reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import continuous, core, wom
from .errors import DomainError, InfeasibleError, SolverError
from .params import ModelParams, apply_axis
from .search import maximize_unimodal

PW_XTOL = 1e-9


@dataclass(frozen=True)
class WarrantySolution:
    p1: float
    p2: float
    theta: float
    p_w: float
    purchase_prob: float
    expected_claims: float
    profit_total: float
    profit_sales: float
    profit_warranty: float
    m_star: Optional[int] = None
    n_periods: Optional[int] = None

    @property
    def markdown(self) -> float:
        return self.p1 - self.p2

    @property
    def theta_fraction(self) -> Optional[Fraction]:
        if self.m_star is None:
            return None
        return Fraction(self.m_star, self.n_periods)


def warranty_purchase_prob(p_w, d):
    """Probability 1 - d*p_w that a buyer also buys the warranty."""
    if not 0.0 <= p_w <= 1.0 / d:
        raise DomainError(f"p_w must lie in [0, 1/d] = [0, {1.0 / d:.6g}], got {p_w}")
    return 1.0 - d * p_w


def warranty_margin(params: ModelParams, p_w) -> float:
    """Expected warranty profit per product sold."""
    params.require_warranty()
    return warranty_purchase_prob(p_w, params.d) * (p_w - params.f0 * params.cw)


def warranty_weights(params: ModelParams, p_w, use_wom=True) -> np.ndarray:
    """Demand multipliers for periods 1..N given the warranty price."""
    if not use_wom:
        return np.ones(params.n_periods)
    # r_c(i) - rm = beta1^i (r_c(0) - rm), period i uses r_c(i)
    gap0 = core.warranty_initial_perception(params, p_w) - params.rm
    return 1.0 + params.beta1 ** np.arange(1, params.n_periods + 1) * gap0


def _check_m(params, M):
    if int(M) != M or not 1 <= M <= params.n_periods - 1:
        raise DomainError(f"M must be an integer in 1..{params.n_periods - 1}, got {M}")
    return int(M)


@dataclass(frozen=True)
class _Evaluation:
    p1: np.ndarray
    p2: np.ndarray
    sales: np.ndarray
    warranty: np.ndarray
    mass1: np.ndarray
    mass2: np.ndarray

    @property
    def total(self):
        return self.sales + self.warranty


def _evaluate(params, p_w, use_wom):
    params.require_warranty()
    m = warranty_margin(params, p_w)
    prof = wom.stage_profile(params, warranty_weights(params, p_w, use_wom))
    p1 = wom.stage_prices(params, prof.mass1, prof.disc1, m)
    p2 = wom.stage_prices(params, prof.mass2, prof.disc2, m)
    c, g = params.c, params.gamma
    with np.errstate(invalid="ignore", divide="ignore"):
        sales = (continuous.stage_profit(p1, prof.mass1, prof.disc1, c, g)
                 + continuous.stage_profit(p2, prof.mass2, prof.disc2, c, g))
        warr = m * (prof.mass1 * p1 ** (-g) + prof.mass2 * p2 ** (-g))
    return _Evaluation(p1, p2, sales, warr, prof.mass1, prof.mass2)


def _feasible(ev):
    return (ev.p1 > 0.0) & (ev.p2 > 0.0)


def joint_prices(params: ModelParams, M, p_w, use_wom=True):
    """Stage prices for switch period M and warranty price p_w."""
    k = _check_m(params, M) - 1
    ev = _evaluate(params, p_w, use_wom)
    p1, p2 = float(ev.p1[k]), float(ev.p2[k])
    if p1 <= 0.0 or p2 <= 0.0:
        raise InfeasibleError(
            f"warranty margin at p_w={p_w:.6g} drives a stage price nonpositive "
            f"(p1={p1:.6g}, p2={p2:.6g})")
    return p1, p2


def joint_profit(params: ModelParams, M, p_w, use_wom=True):
    """(total, sales, warranty) profit at the optimal prices for (M, p_w)."""
    k = _check_m(params, M) - 1
    joint_prices(params, M, p_w, use_wom)
    ev = _evaluate(params, p_w, use_wom)
    sales, warr = float(ev.sales[k]), float(ev.warranty[k])
    return sales + warr, sales, warr


def expected_claims(params: ModelParams, p1, p2, M, p_w, use_wom=True) -> float:
    """Expected number of warranty claims over the horizon."""
    M = _check_m(params, M)
    prob = warranty_purchase_prob(p_w, params.d)
    mass, _ = core.period_masses(params.density, params.n_periods, params.alpha)
    wm = warranty_weights(params, p_w, use_wom) * mass
    g = params.gamma
    demand = wm[:M].sum() / p1**g + wm[M:].sum() / p2**g
    return float(prob * params.f0 * demand)


def best_profit_at(params: ModelParams, p_w, use_wom=True) -> float:
    """Profit maximized over M and prices for a fixed warranty price."""
    ev = _evaluate(params, p_w, use_wom)
    total = np.where(_feasible(ev), ev.total, -np.inf)
    return float(total.max())


def _pw_bounds(params):
    return 0.0, 1.0 / params.d


def solve_joint(params: ModelParams, use_wom=True) -> WarrantySolution:
    """Jointly optimal (p1, p2, M, p_w) for the N-period model.

    The outer search over p_w checks unimodality on a 50-point grid before
    refining; the inner problem enumerates M.
    """
    params.require_warranty()
    lo, hi = _pw_bounds(params)
    best = maximize_unimodal(lambda pw: best_profit_at(params, pw, use_wom), lo, hi,
                             xtol=PW_XTOL)
    p_w = min(max(best.x, lo), hi)
    ev = _evaluate(params, p_w, use_wom)
    total = np.where(_feasible(ev), ev.total, -np.inf)
    k = int(np.argmax(total))
    p1, p2 = float(ev.p1[k]), float(ev.p2[k])
    M = k + 1
    return WarrantySolution(
        p1=p1, p2=p2, theta=M / params.n_periods, p_w=p_w,
        purchase_prob=warranty_purchase_prob(p_w, params.d),
        expected_claims=expected_claims(params, p1, p2, M, p_w, use_wom),
        profit_total=float(ev.sales[k] + ev.warranty[k]),
        profit_sales=float(ev.sales[k]), profit_warranty=float(ev.warranty[k]),
        m_star=M, n_periods=params.n_periods,
    )


# ---------------------------------------------------------------------------
# continuous switching time, no WOM
# ---------------------------------------------------------------------------

def _continuous_terms(params, theta, p_w):
    m = warranty_margin(params, p_w)
    m1, d1, m2, d2 = continuous.stage_integrals(params, theta)
    g, c = params.gamma, params.c
    p1 = g / (g - 1.0) * (c * d1 / m1 - m)
    p2 = g / (g - 1.0) * (c * d2 / m2 - m)
    if p1 <= 0.0 or p2 <= 0.0:
        return None
    sales = (continuous.stage_profit(p1, m1, d1, c, g)
             + continuous.stage_profit(p2, m2, d2, c, g))
    warr = m * (m1 * p1 ** (-g) + m2 * p2 ** (-g))
    return p1, p2, sales, warr, m1, m2


def continuous_profit(params: ModelParams, theta, p_w) -> float:
    terms = _continuous_terms(params, theta, p_w)
    if terms is None:
        return -math.inf
    return terms[2] + terms[3]


def _best_theta(params, p_w):
    return maximize_unimodal(lambda t: continuous_profit(params, t, p_w),
                             1e-6, 1.0 - 1e-6, xtol=1e-10)


def solve_warranty_continuous(params: ModelParams) -> WarrantySolution:
    """Warranty without WOM, with a continuous switching time."""
    params.require_warranty()
    lo, hi = _pw_bounds(params)
    best = maximize_unimodal(lambda pw: _best_theta(params, pw).value, lo, hi, xtol=PW_XTOL)
    p_w = min(max(best.x, lo), hi)
    theta = _best_theta(params, p_w).x
    terms = _continuous_terms(params, theta, p_w)
    if terms is None:
        raise InfeasibleError("no feasible switching time at the optimal warranty price")
    p1, p2, sales, warr, m1, m2 = terms
    prob = warranty_purchase_prob(p_w, params.d)
    g = params.gamma
    return WarrantySolution(
        p1=p1, p2=p2, theta=theta, p_w=p_w, purchase_prob=prob,
        expected_claims=prob * params.f0 * (m1 / p1**g + m2 / p2**g),
        profit_total=sales + warr, profit_sales=sales, profit_warranty=warr,
    )


# ---------------------------------------------------------------------------
# case comparison and sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseRow:
    case: str
    p1: float
    p2: float
    theta: float
    p_w: float
    profit: float
    pct_of_case_i: float
    m_star: Optional[int] = None
    n_periods: Optional[int] = None


CASE_LABELS = ("I", "II-OE", "II-UE", "III", "IV-OE", "IV-UE")


def case_comparison(params: ModelParams, r0_ue: float):
    """Solve the four model variants, with both estimation directions.

    I: no WOM, no warranty (continuous).  II: WOM only (N periods).
    III: warranty only (continuous).  IV: WOM and warranty (N periods).
    ``params.r0`` is the overestimating perception and ``r0_ue`` the
    underestimating one; ``rm`` is shared.
    """
    params.require_warranty()
    ue = params.replace(r0=r0_ue)
    base = continuous.solve_theta_star(params.replace(r0=params.rm))
    solved = [
        ("I", base),
        ("II-OE", wom.solve_M_star(params)),
        ("II-UE", wom.solve_M_star(ue)),
        ("III", solve_warranty_continuous(params)),
        ("IV-OE", solve_joint(params)),
        ("IV-UE", solve_joint(ue)),
    ]
    rows = []
    for label, sol in solved:
        if isinstance(sol, WarrantySolution):
            profit, p_w = sol.profit_total, sol.p_w
        else:
            profit, p_w = sol.profit, math.nan
        rows.append(CaseRow(label, sol.p1, sol.p2, sol.theta, p_w, profit,
                            100.0 * (profit / base.profit), sol.m_star, sol.n_periods))
    return rows


@dataclass(frozen=True)
class WarrantySweepRow:
    value: float
    p1: float = math.nan
    p2: float = math.nan
    theta: float = math.nan
    profit: float = math.nan
    p1_w: float = math.nan
    p2_w: float = math.nan
    theta_w: float = math.nan
    p_w: float = math.nan
    profit_w: float = math.nan
    error: str = ""

    @property
    def markdown(self):
        return self.p1 - self.p2

    @property
    def markdown_w(self):
        return self.p1_w - self.p2_w

    @property
    def profit_gap(self):
        return self.profit_w - self.profit

    @property
    def ok(self):
        return not self.error


def sweep_warranty(params: ModelParams, axis: str, grid: Sequence[float], use_wom=True):
    """Side-by-side solutions without and with the warranty along one axis.

    With ``use_wom`` the pair is (WOM only, WOM + warranty) on N periods;
    otherwise (no WOM, warranty only) with a continuous switching time.
    """
    rows = []
    for value in grid:
        try:
            p = apply_axis(params, axis, value)
            if use_wom:
                plain, joint = wom.solve_M_star(p), solve_joint(p)
            else:
                plain = continuous.solve_theta_star(p.replace(r0=p.rm))
                joint = solve_warranty_continuous(p)
        except (DomainError, InfeasibleError, SolverError) as exc:
            rows.append(WarrantySweepRow(float(value), error=str(exc)))
            continue
        rows.append(WarrantySweepRow(
            float(value), plain.p1, plain.p2, plain.theta, plain.profit,
            joint.p1, joint.p2, joint.theta, joint.p_w, joint.profit_total))
    return rows
