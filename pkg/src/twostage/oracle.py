"""Exhaustive grid maximization of the raw profit expressions.

Nothing here calls the solver modules: stage profits are evaluated as
p^-g (p * mass - c * discounted mass) (plus the warranty margin where
applicable) directly on price grids, with masses taken from the model-core
density integrals.  Argmax ties resolve to the first grid point in
ascending (p_w, theta or M, p1, p2) order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import core
from .continuous import TwoStageSolution
from .errors import DomainError
from .params import ModelParams
from .warranty import WarrantySolution

ROW_CHUNK = 400


class BoundaryWarning(UserWarning):
    """The grid argmax sits on the edge of the search window."""


@dataclass(frozen=True)
class GridSpec:
    price_lo: float
    price_hi: float
    price_step: float
    theta_step: float = 1e-3
    pw_step: float = 2e-4

    def __post_init__(self):
        for name in ("price_step", "theta_step", "pw_step"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be > 0")
        if not self.price_lo < self.price_hi:
            raise DomainError("price_lo must be < price_hi")
        if self.price_lo <= 0.0:
            raise DomainError("price_lo must be > 0")
        if (self.price_hi - self.price_lo) / self.price_step < 2.0:
            raise DomainError("price grid needs at least 3 points")
        if self.theta_step > 1.0 / 4.0:
            raise DomainError("theta grid needs at least 3 interior points")

    @classmethod
    def default(cls, params: ModelParams, **overrides) -> "GridSpec":
        """Window bracketing every learning-curve price, c * gamma/(gamma-1) * [0.5 e^-a, 1.5]."""
        top = params.single_price
        values = dict(price_lo=0.5 * top * math.exp(-params.alpha), price_hi=1.5 * top,
                      price_step=1e-4 * params.c)
        values.update(overrides)
        return cls(**values)

    def prices(self) -> np.ndarray:
        n = int(math.floor((self.price_hi - self.price_lo) / self.price_step + 1e-9))
        return self.price_lo + self.price_step * np.arange(n + 1)

    def thetas(self) -> np.ndarray:
        n = int(round(1.0 / self.theta_step))
        return np.arange(1, n) * (1.0 / n)

    def warranty_prices(self, d) -> np.ndarray:
        n = int(math.floor(1.0 / (d * self.pw_step) + 1e-9))
        return self.pw_step * np.arange(n + 1)


@dataclass(frozen=True)
class OracleResult:
    """Grid optimum plus the tolerances it supports.

    ``p1_tol`` and ``p2_tol`` are one price step plus the price change to
    the neighboring theta (or M) cells; ``profit_tol`` bounds how far the
    grid optimum can sit below the true optimum, estimated from the profit
    change across neighboring cells on every axis.
    """

    solution: object
    p1_tol: float
    p2_tol: float
    theta_tol: float
    profit_tol: float
    on_boundary: bool
    profile: np.ndarray = field(repr=False, compare=False)
    pw_tol: Optional[float] = None


def _power_tables(prices, gamma):
    return prices ** (1.0 - gamma), prices ** (-gamma)


def _best_price(mass, const, up, vp, prices):
    """Row-wise max of mass * p^(1-g) + const * p^-g over the price grid.

    ``const`` is (margin * mass - c * discounted mass); returns the best
    value and the index of the best price for every row.
    """
    best = np.empty(len(mass))
    idx = np.empty(len(mass), dtype=int)
    for s in range(0, len(mass), ROW_CHUNK):
        sl = slice(s, s + ROW_CHUNK)
        vals = np.outer(mass[sl], up) + np.outer(const[sl], vp)
        k = np.argmax(vals, axis=1)
        idx[sl] = k
        best[sl] = vals[np.arange(len(k)), k]
    return best, idx


def _neighbor_gap(values, k):
    """Largest absolute change from cell k to its finite neighbors."""
    near = values[max(k - 1, 0):k + 2]
    near = near[np.isfinite(near)]
    return float(np.max(np.abs(near - values[k])))


def _stage_masses_continuous(params, thetas):
    dens, a = params.density, params.alpha
    m1 = np.array([core.density_mass(dens, 0.0, t) for t in thetas])
    d1 = np.array([core.discounted_density_mass(dens, 0.0, t, a) for t in thetas])
    m2 = np.array([core.density_mass(dens, t, 1.0) for t in thetas])
    d2 = np.array([core.discounted_density_mass(dens, t, 1.0, a) for t in thetas])
    return m1, d1, m2, d2


def _stage_masses_discrete(params, weights):
    mass, disc = core.period_masses(params.density, params.n_periods, params.alpha)
    wa, wb = weights * mass, weights * disc
    n = params.n_periods
    m1 = np.array([wa[:M].sum() for M in range(1, n)])
    d1 = np.array([wb[:M].sum() for M in range(1, n)])
    m2 = np.array([wa[M:].sum() for M in range(1, n)])
    d2 = np.array([wb[M:].sum() for M in range(1, n)])
    return m1, d1, m2, d2


def _wom_weights(params):
    path = core.wom_path(params.r0, params.rm, params.beta, params.n_periods)
    return 1.0 + path.period_values() - params.rm


def _price_profit_tol(mass, const, prices, k, gamma):
    """Profit change when the price moves one step from grid index k."""
    p = prices[[max(k - 1, 0), k, min(k + 1, len(prices) - 1)]]
    f = mass * p ** (1.0 - gamma) + const * p ** (-gamma)
    return float(np.max(np.abs(f - f[1])))


def brute_force_two_stage(params: ModelParams, grid: Optional[GridSpec] = None,
                          discrete=False) -> OracleResult:
    """Exhaustive argmax over (p1, p2, theta), or (p1, p2, M) when ``discrete``.

    The discrete variant uses the WOM demand weights of ``params``; the
    continuous one ignores WOM.  Stage profits are separable in the prices,
    so the 3-D search runs as a 2-D price-by-switch table per stage followed
    by a 1-D scan over the switch axis.
    """
    grid = grid or GridSpec.default(params)
    prices = grid.prices()
    up, vp = _power_tables(prices, params.gamma)
    c = params.c
    if discrete:
        axis = np.arange(1, params.n_periods) / params.n_periods
        m1, d1, m2, d2 = _stage_masses_discrete(params, _wom_weights(params))
    else:
        axis = grid.thetas()
        m1, d1, m2, d2 = _stage_masses_continuous(params, axis)
    s1, i1 = _best_price(m1, -c * d1, up, vp, prices)
    s2, i2 = _best_price(m2, -c * d2, up, vp, prices)
    total = s1 + s2
    k = int(np.argmax(total))
    p1, p2 = float(prices[i1[k]]), float(prices[i2[k]])
    on_boundary = _boundary(k, len(axis), (i1[k], i2[k]), len(prices))
    p1n, p2n = prices[i1], prices[i2]
    sol = TwoStageSolution(
        p1=p1, p2=p2, theta=float(axis[k]), profit=float(total[k]),
        profit_stage1=float(s1[k]), profit_stage2=float(s2[k]),
        m_star=k + 1 if discrete else None,
        n_periods=params.n_periods if discrete else None,
    )
    profit_tol = (_neighbor_gap(total, k)
                  + _price_profit_tol(m1[k], -c * d1[k], prices, i1[k], params.gamma)
                  + _price_profit_tol(m2[k], -c * d2[k], prices, i2[k], params.gamma))
    return OracleResult(
        solution=sol,
        p1_tol=grid.price_step + _neighbor_gap(p1n, k),
        p2_tol=grid.price_step + _neighbor_gap(p2n, k),
        theta_tol=float(axis[1] - axis[0]),
        profit_tol=profit_tol,
        on_boundary=on_boundary,
        profile=total,
    )


def _boundary(k, n_axis, price_idx, n_prices):
    hit = k in (0, n_axis - 1) or any(i in (0, n_prices - 1) for i in price_idx)
    if hit:
        warnings.warn("oracle argmax lies on the grid boundary; widen the search window",
                      BoundaryWarning, stacklevel=3)
    return hit


def _warranty_weights(params, p_w, use_wom):
    if not use_wom:
        return np.ones(params.n_periods)
    path = core.wom_path_with_warranty(params, p_w)
    return 1.0 + path.period_values() - params.rm


def brute_force_joint(params: ModelParams, grid: Optional[GridSpec] = None,
                      mode="grid", use_wom=True) -> OracleResult:
    """Exhaustive argmax over (p_w, M) of the sales-plus-warranty profit.

    ``mode="grid"`` also searches both prices on the price grid;
    ``mode="analytic"`` uses the first-order-condition prices
    g/(g-1) * (c * disc/mass - margin) inside each (p_w, M) cell.
    """
    if mode not in ("grid", "analytic"):
        raise DomainError(f"mode must be 'grid' or 'analytic', got {mode!r}")
    params.require_warranty()
    grid = grid or GridSpec.default(params)
    prices = grid.prices()
    up, vp = _power_tables(prices, params.gamma)
    c, g, d = params.c, params.gamma, params.d
    pws = grid.warranty_prices(d)
    n_m = params.n_periods - 1
    table = np.full((len(pws), n_m), -np.inf)
    choice = np.zeros((len(pws), n_m, 2))
    for r, pw in enumerate(pws):
        margin = (1.0 - d * pw) * (pw - params.f0 * params.cw)
        m1, d1, m2, d2 = _stage_masses_discrete(params, _warranty_weights(params, pw, use_wom))
        if mode == "grid":
            s1, i1 = _best_price(m1, margin * m1 - c * d1, up, vp, prices)
            s2, i2 = _best_price(m2, margin * m2 - c * d2, up, vp, prices)
            table[r] = s1 + s2
            choice[r, :, 0], choice[r, :, 1] = prices[i1], prices[i2]
        else:
            q1 = g / (g - 1.0) * (c * d1 / m1 - margin)
            q2 = g / (g - 1.0) * (c * d2 / m2 - margin)
            ok = (q1 > 0.0) & (q2 > 0.0)
            with np.errstate(invalid="ignore", divide="ignore"):
                val = (q1 ** (-g) * ((q1 + margin) * m1 - c * d1)
                       + q2 ** (-g) * ((q2 + margin) * m2 - c * d2))
            table[r] = np.where(ok, val, -np.inf)
            choice[r, :, 0], choice[r, :, 1] = q1, q2
    r, k = (int(i) for i in np.unravel_index(int(np.argmax(table)), table.shape))
    pw = float(pws[r])
    p1, p2 = (float(x) for x in choice[r, k])
    margin = (1.0 - d * pw) * (pw - params.f0 * params.cw)
    weights = _warranty_weights(params, pw, use_wom)
    m1, d1, m2, d2 = _stage_masses_discrete(params, weights)
    sales = p1 ** (-g) * (p1 * m1[k] - c * d1[k]) + p2 ** (-g) * (p2 * m2[k] - c * d2[k])
    warr = margin * (m1[k] * p1 ** (-g) + m2[k] * p2 ** (-g))
    prob = 1.0 - d * pw
    sol = WarrantySolution(
        p1=p1, p2=p2, theta=(k + 1) / params.n_periods, p_w=pw, purchase_prob=prob,
        expected_claims=prob * params.f0 * (m1[k] / p1**g + m2[k] / p2**g),
        profit_total=float(sales + warr), profit_sales=float(sales),
        profit_warranty=float(warr), m_star=int(k + 1), n_periods=params.n_periods,
    )
    best_by_pw = table.max(axis=1)
    if mode == "grid":
        price_idx = (int(np.searchsorted(prices, p1 - 0.5 * grid.price_step)),
                     int(np.searchsorted(prices, p2 - 0.5 * grid.price_step)))
        price_term = (_price_profit_tol(m1[k], margin * m1[k] - c * d1[k], prices,
                                        price_idx[0], g)
                      + _price_profit_tol(m2[k], margin * m2[k] - c * d2[k], prices,
                                          price_idx[1], g))
        p_step = grid.price_step
    else:
        price_idx, price_term, p_step = (), 0.0, 0.0
    on_boundary = _boundary(k, n_m, price_idx, len(prices)) if mode == "grid" else False
    return OracleResult(
        solution=sol,
        p1_tol=p_step + max(_neighbor_gap(choice[:, k, 0], r), _neighbor_gap(choice[r, :, 0], k)),
        p2_tol=p_step + max(_neighbor_gap(choice[:, k, 1], r), _neighbor_gap(choice[r, :, 1], k)),
        theta_tol=1.0 / params.n_periods,
        profit_tol=_neighbor_gap(best_by_pw, r) + _neighbor_gap(table[r], k) + price_term,
        on_boundary=on_boundary,
        profile=best_by_pw,
        pw_tol=grid.pw_step,
    )
