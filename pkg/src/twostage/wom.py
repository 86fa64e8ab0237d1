"""N-period model with word of mouth.

The sales horizon is split into N equal periods.  Period j carries demand
weight 1 + r_c(j) - rm, and all stage quantities are exact per-period sums
of the demand-density integrals, so with r0 = rm every result coincides
with the continuous model at theta = M/N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import continuous, core
from .continuous import TwoStageSolution
from .errors import DomainError
from .params import ModelParams


def period_deviations(params: ModelParams) -> np.ndarray:
    """r_c(j) - rm = beta^(j-1) (r0 - rm) for periods 1..N.

    Taken from the unrolled recursion rather than by subtracting rm from the
    path, which would round small deviations to zero.
    """
    return params.beta ** np.arange(params.n_periods) * (params.r0 - params.rm)


def period_weights(params: ModelParams) -> np.ndarray:
    """Demand multipliers 1 + r_c(j) - rm for periods 1..N."""
    return 1.0 + period_deviations(params)


@dataclass(frozen=True)
class StageProfile:
    """Weighted stage sums for every switch period M = 1..N-1.

    ``mass1[k]`` is the weighted demand mass of stage 1 when M = k + 1, and
    ``disc1[k]`` the matching discounted-cost mass; likewise for stage 2.
    """

    mass1: np.ndarray
    disc1: np.ndarray
    mass2: np.ndarray
    disc2: np.ndarray

    @property
    def n_periods(self) -> int:
        return len(self.mass1) + 1


def stage_profile(params: ModelParams, weights: np.ndarray) -> StageProfile:
    mass, disc = core.period_masses(params.density, params.n_periods, params.alpha)
    wa, wb = weights * mass, weights * disc
    # suffix sums for stage 2 instead of total - prefix, to keep precision
    return StageProfile(
        mass1=np.cumsum(wa)[:-1],
        disc1=np.cumsum(wb)[:-1],
        mass2=np.cumsum(wa[::-1])[::-1][1:],
        disc2=np.cumsum(wb[::-1])[::-1][1:],
    )


def stage_prices(params: ModelParams, mass, disc, margin=0.0):
    """First-order-condition price gamma/(gamma-1) * (c * disc/mass - margin)."""
    g = params.gamma
    return g / (g - 1.0) * (params.c * disc / mass - margin)


def _check_m(params, M):
    if int(M) != M or not 1 <= M <= params.n_periods - 1:
        raise DomainError(f"M must be an integer in 1..{params.n_periods - 1}, got {M}")
    return int(M)


def _profile(params):
    return stage_profile(params, period_weights(params))


def discrete_prices(params: ModelParams, M):
    """Optimal (p1, p2) when the price switches after period M."""
    k = _check_m(params, M) - 1
    prof = _profile(params)
    return (
        float(stage_prices(params, prof.mass1[k], prof.disc1[k])),
        float(stage_prices(params, prof.mass2[k], prof.disc2[k])),
    )


def simplified_prices(params: ModelParams, M):
    """Large-N closed form of the discrete prices (uniform demand, alpha > 0).

    Replaces the geometric sums of beta^(j-1) e^{-alpha j/N} by their
    N -> infinity limits.  Kept as a cross-check of :func:`discrete_prices`.
    """
    M = _check_m(params, M)
    a, g, c, b = params.alpha, params.gamma, params.c, params.beta
    if a <= 0.0:
        raise DomainError("simplified prices need alpha > 0")
    N, dr = params.n_periods, params.r0 - params.rm
    e_m, e_1 = math.exp(-a * M / N), math.exp(-a)
    k = c * g / (a * (g - 1.0))
    p1 = k * (N * (1.0 - e_m) + a * dr * (1.0 - b**M * e_m) / (1.0 - b)) / (
        M + dr * (1.0 - b**M) / (1.0 - b))
    p2 = k * (N * (e_m - e_1) + a * dr * b**M * (e_m - b ** (N - M) * e_1) / (1.0 - b)) / (
        (N - M) + dr * b**M * (1.0 - b ** (N - M)) / (1.0 - b))
    return p1, p2


def _stage_profits(params, prof, prices1, prices2, k):
    c, g = params.c, params.gamma
    s1 = continuous.stage_profit(prices1, prof.mass1[k], prof.disc1[k], c, g)
    s2 = continuous.stage_profit(prices2, prof.mass2[k], prof.disc2[k], c, g)
    return s1, s2


def discrete_profits(params: ModelParams, M):
    """(pi1, pi2, total) at the optimal discrete prices for switch period M."""
    k = _check_m(params, M) - 1
    prof = _profile(params)
    p1 = stage_prices(params, prof.mass1[k], prof.disc1[k])
    p2 = stage_prices(params, prof.mass2[k], prof.disc2[k])
    s1, s2 = _stage_profits(params, prof, p1, p2, k)
    return float(s1), float(s2), float(s1 + s2)


def profits_by_period(params: ModelParams):
    """Total optimal profit for every M = 1..N-1 (index M-1)."""
    prof = _profile(params)
    p1 = stage_prices(params, prof.mass1, prof.disc1)
    p2 = stage_prices(params, prof.mass2, prof.disc2)
    idx = np.arange(len(prof.mass1))
    s1, s2 = _stage_profits(params, prof, p1, p2, idx)
    return s1 + s2


def solve_M_star(params: ModelParams) -> TwoStageSolution:
    """Best switch period by enumerating M = 1..N-1 (smallest M on ties)."""
    prof = _profile(params)
    p1 = stage_prices(params, prof.mass1, prof.disc1)
    p2 = stage_prices(params, prof.mass2, prof.disc2)
    idx = np.arange(len(prof.mass1))
    s1, s2 = _stage_profits(params, prof, p1, p2, idx)
    k = int(np.argmax(s1 + s2))
    N = params.n_periods
    return TwoStageSolution(
        p1=float(p1[k]), p2=float(p2[k]), theta=(k + 1) / N,
        profit=float(s1[k] + s2[k]), profit_stage1=float(s1[k]),
        profit_stage2=float(s2[k]), m_star=k + 1, n_periods=N,
    )


def convergence_ratio(params: ModelParams, n_periods: int) -> float:
    """Optimal discrete profit over optimal continuous profit, without WOM."""
    if n_periods < 2:
        raise DomainError("n_periods must be >= 2")
    bench = params.replace(r0=params.rm, n_periods=int(n_periods))
    return solve_M_star(bench).profit / continuous.solve_theta_star(bench).profit


# ---------------------------------------------------------------------------
# effect of WOM on profit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WomStageAggregates:
    """Benchmark stage masses (A, B) and their WOM corrections (C, D).

    A is demand mass, B is alpha times discounted-cost mass, so that each
    stage profit equals profit_scale * A^g / B^(g-1) without WOM and
    profit_scale * (A+C)^g / (B+D)^(g-1) with it.
    """

    A1: float
    A2: float
    B1: float
    B2: float
    C1: float
    C2: float
    D1: float
    D2: float
    M: int
    n_periods: int

    def stage_terms(self):
        return ((self.A1, self.B1, self.C1, self.D1), (self.A2, self.B2, self.C2, self.D2))


def stage_aggregates(params: ModelParams, M) -> WomStageAggregates:
    M = _check_m(params, M)
    mass, disc = core.period_masses(params.density, params.n_periods, params.alpha)
    dev = period_deviations(params)
    a = params.alpha
    s1, s2 = slice(0, M), slice(M, None)
    return WomStageAggregates(
        A1=float(mass[s1].sum()), A2=float(mass[s2].sum()),
        B1=a * float(disc[s1].sum()), B2=a * float(disc[s2].sum()),
        C1=float((dev * mass)[s1].sum()), C2=float((dev * mass)[s2].sum()),
        D1=a * float((dev * disc)[s1].sum()), D2=a * float((dev * disc)[s2].sum()),
        M=M, n_periods=params.n_periods,
    )


def wom_gain_condition(params: ModelParams, M) -> bool:
    """True iff WOM raises total profit above the benchmark at the same M.

    Each stage's WOM profit is its benchmark profit A^g/B^(g-1) times
    ((A+C)/A)^g (B/(B+D))^(g-1); the gain is positive iff the benchmark-
    weighted sum of (ratio - 1) is positive.
    """
    if params.alpha <= 0.0:
        raise DomainError("the WOM gain condition needs alpha > 0")
    agg = stage_aggregates(params, M)
    g = params.gamma
    gain = 0.0
    for A, B, C, D in agg.stage_terms():
        base = A**g / B ** (g - 1.0)
        gain += base * math.expm1(g * math.log1p(C / A) - (g - 1.0) * math.log1p(D / B))
    return gain > 0.0


def wom_gain_condition_as_stated(params: ModelParams, M) -> bool:
    """Unweighted sum form of the gain inequality.

    sum A/(A+C) < sum ((A+C)/(B+D) * B/A)^(g-1).  Each stage term alone is
    an exact per-stage criterion, but the plain sum is not equivalent to a
    total-profit gain; :func:`wom_gain_condition` is the exact test.
    """
    agg = stage_aggregates(params, M)
    g = params.gamma
    lhs = rhs = 0.0
    for A, B, C, D in agg.stage_terms():
        lhs += A / (A + C)
        rhs += ((A + C) / (B + D) * B / A) ** (g - 1.0)
    return lhs < rhs


def oe_sufficient_condition(params: ModelParams, M) -> bool:
    """A1/B1 < C1/D1 and A2/B2 < C2/D2, for overestimation (r0 > rm) only."""
    if not params.r0 > params.rm:
        raise DomainError("the sufficient condition applies to overestimation (r0 > rm) only")
    agg = stage_aggregates(params, M)
    # A/B < C/D with B, D > 0, cross-multiplied so D underflowing to 0 is safe
    return all(A * D < C * B for A, B, C, D in agg.stage_terms())


def discrete_price_order_check(params: ModelParams, M) -> bool:
    """Whether the optimal discrete prices mark down (p1 > p2)."""
    p1, p2 = discrete_prices(params, M)
    return p1 > p2
