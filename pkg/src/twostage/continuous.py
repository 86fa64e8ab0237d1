"""Two-stage pricing without word of mouth (r0 = rm).

For uniform demand the stage prices have closed forms and the optimal
switching time is the unique root of :func:`twostage.core.z_fn`, located by
bisection.  Other densities use the same first-order structure with
density integrals and a unimodal search over the switching time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import core
from .errors import DomainError, SolverError
from .params import ModelParams
from .search import bisect_decreasing, maximize_unimodal

THETA_PROBE = 1e-9
THETA_XTOL = 1e-12


@dataclass(frozen=True)
class TwoStageSolution:
    p1: float
    p2: float
    theta: float
    profit: float
    profit_stage1: float
    profit_stage2: float
    m_star: Optional[int] = None
    n_periods: Optional[int] = None

    @property
    def markdown(self) -> float:
        return self.p1 - self.p2

    @property
    def theta_fraction(self) -> Optional[Fraction]:
        """Switch period over N in lowest terms (discrete solutions only)."""
        if self.m_star is None:
            return None
        return Fraction(self.m_star, self.n_periods)


def _check_theta(theta):
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")


def stage_profit(price, mass, disc_mass, c, gamma):
    """Profit of one stage: price^-gamma * (price * mass - c * discounted mass)."""
    return price ** (-gamma) * (price * mass - c * disc_mass)


def stage_integrals(params: ModelParams, theta):
    """(mass, discounted mass) of demand in [0, theta] and [theta, 1]."""
    dens, a = params.density, params.alpha
    return (
        core.density_mass(dens, 0.0, theta),
        core.discounted_density_mass(dens, 0.0, theta, a),
        core.density_mass(dens, theta, 1.0),
        core.discounted_density_mass(dens, theta, 1.0, a),
    )


def optimal_prices_given_theta(params: ModelParams, theta):
    """Profit-maximizing (p1, p2) for a fixed switching time."""
    _check_theta(theta)
    g, c, a = params.gamma, params.c, params.alpha
    if a == 0.0:
        return params.single_price, params.single_price
    if params.density.is_uniform:
        k = c * g / (a * (g - 1.0))
        return k * core.phi1(theta, a), k * core.phi2(theta, a)
    m1, d1, m2, d2 = stage_integrals(params, theta)
    k = c * g / (g - 1.0)
    return k * d1 / m1, k * d2 / m2


def stage_profits(params: ModelParams, theta, p1, p2):
    """Direct evaluation of both stage profits at arbitrary prices."""
    m1, d1, m2, d2 = stage_integrals(params, theta)
    return (
        stage_profit(p1, m1, d1, params.c, params.gamma),
        stage_profit(p2, m2, d2, params.c, params.gamma),
    )


def profit_scale(params: ModelParams) -> float:
    """[alpha (gamma-1)]^(gamma-1) / (gamma^gamma c^(gamma-1))."""
    g = params.gamma
    return (params.alpha * (g - 1.0)) ** (g - 1.0) / (g**g * params.c ** (g - 1.0))


def reduced_profit(theta, alpha, gamma):
    """theta^g / (1-e^{-a theta})^(g-1) + (1-theta)^g / (e^{-a theta}-e^{-a})^(g-1)."""
    b1 = -np.expm1(-alpha * theta)
    b2 = -np.exp(-alpha * theta) * np.expm1(-alpha * (1.0 - theta))
    return theta**gamma / b1 ** (gamma - 1.0) + (1.0 - theta) ** gamma / b2 ** (gamma - 1.0)


def total_profit(params: ModelParams, theta) -> float:
    """Total profit at the optimal stage prices for switching time ``theta``."""
    _check_theta(theta)
    if params.alpha > 0.0 and params.density.is_uniform:
        return profit_scale(params) * float(reduced_profit(theta, params.alpha, params.gamma))
    p1, p2 = optimal_prices_given_theta(params, theta)
    return float(sum(stage_profits(params, theta, p1, p2)))


def _solution(params, theta):
    p1, p2 = optimal_prices_given_theta(params, theta)
    s1, s2 = stage_profits(params, theta, p1, p2)
    return TwoStageSolution(p1=p1, p2=p2, theta=theta, profit=s1 + s2,
                            profit_stage1=s1, profit_stage2=s2)


def solve_theta_star(params: ModelParams) -> TwoStageSolution:
    """Optimal switching time and stage prices.

    Uniform demand: bisection on the normalized sign function z, which is
    strictly decreasing with a single root.  Other densities: unimodal
    search on the directly evaluated profit.
    """
    if params.alpha <= 0.0:
        raise DomainError("alpha must be > 0 for switching-time optimization "
                          "(without learning both stage prices equal c*gamma/(gamma-1))")
    if not params.density.is_uniform:
        return solve_theta_numeric(params)
    a, g = params.alpha, params.gamma
    try:
        theta = bisect_decreasing(lambda x: core.z_fn(x, a, g, normalized=True),
                                  THETA_PROBE, 1.0 - THETA_PROBE, xtol=THETA_XTOL)
    except SolverError as exc:
        raise SolverError(f"z has no sign change for alpha={a}, gamma={g}: {exc}") from exc
    return _solution(params, theta)


def solve_theta_numeric(params: ModelParams, xtol=1e-10) -> TwoStageSolution:
    """Switching time by unimodal search on the quadrature profit."""
    lo, hi = 1e-6, 1.0 - 1e-6
    best = maximize_unimodal(lambda t: total_profit(params, t), lo, hi, xtol=xtol)
    return _solution(params, best.x)


SWEEP_AXES = ("alpha", "gamma", "c")


@dataclass(frozen=True)
class SweepRow:
    value: float
    p1: float = math.nan
    p2: float = math.nan
    theta: float = math.nan
    profit: float = math.nan
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def sweep_observations(params: ModelParams, axis: str, grid: Sequence[float]):
    """Solve the no-WOM problem once per grid value of ``axis``.

    Invalid values produce a row carrying an error message instead of
    aborting the sweep.
    """
    if axis not in SWEEP_AXES:
        raise DomainError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    rows = []
    for value in grid:
        try:
            sol = solve_theta_star(params.replace(**{axis: float(value)}))
        except (DomainError, SolverError) as exc:
            rows.append(SweepRow(float(value), error=str(exc)))
            continue
        rows.append(SweepRow(float(value), sol.p1, sol.p2, sol.theta, sol.profit))
    return rows
