"""Randomized invariant suites for the secant slopes, the sign function and
the solvers built on them.

Each suite draws its own parameters from a seeded generator and reports how
many checks ran, how many failed, and the first failing input so a failure
can be reproduced.  Sampling ranges:

    alpha in [0.01, 2], gamma in [2, 8] (Lemma 5) or (1, 8] elsewhere,
    beta in [0.05, 0.95], r0 and rm in [0.3, 0.95], N in {5, 25, 200}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import continuous, core, warranty, wom
from .errors import DomainError, InfeasibleError, SolverError
from .params import ModelParams, table2_params
from .search import is_unimodal

ALPHA_RANGE = (0.01, 2.0)
GAMMA_RANGE = (1.0, 8.0)
GAMMA_RANGE_L5 = (2.0, 8.0)
BETA_RANGE = (0.05, 0.95)
R_RANGE = (0.3, 0.95)
N_CHOICES = (5, 25, 200)
STATIONARITY_TOL = 1e-6
REDUCTION_TOL = 1e-10


@dataclass(frozen=True)
class PropertyResult:
    name: str
    checked: int
    failures: int
    first_failure: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checked > 0


def _result(name, ok, describe):
    ok = np.asarray(ok, dtype=bool)
    bad = np.flatnonzero(~ok)
    first = describe(int(bad[0])) if bad.size else None
    return PropertyResult(name, int(ok.size), int(bad.size), first)


def _draw_alpha(rng, n):
    return rng.uniform(*ALPHA_RANGE, n)


def _draw_gamma(rng, n, lo=GAMMA_RANGE[0]):
    g = rng.uniform(lo, GAMMA_RANGE[1], n)
    # keep strictly above 1 for the open range
    return np.maximum(g, 1.0 + 1e-3) if lo <= 1.0 else g


def _draw_x(rng, n):
    return rng.uniform(1e-6, 1.0 - 1e-6, n)


def _ordered_pairs(rng, n):
    a, b = _draw_x(rng, n), _draw_x(rng, n)
    return np.minimum(a, b), np.maximum(a, b)


# ---------------------------------------------------------------------------
# secant slopes and z
# ---------------------------------------------------------------------------

def lemma1(rng, samples, z=None):
    """phi1 > phi2 > 0."""
    a, x = _draw_alpha(rng, samples), _draw_x(rng, samples)
    f1, f2 = core.phi1(x, a), core.phi2(x, a)
    return _result("lemma1_phi_order", (f1 > f2) & (f2 > 0.0),
                   lambda i: f"alpha={a[i]!r}, x={x[i]!r}")


def lemma2(rng, samples, z=None):
    """phi1 and phi2 strictly decrease in x."""
    a = _draw_alpha(rng, samples)
    x, y = _ordered_pairs(rng, samples)
    ok = (core.phi1(x, a) > core.phi1(y, a)) & (core.phi2(x, a) > core.phi2(y, a))
    return _result("lemma2_phi_decreasing", ok,
                   lambda i: f"alpha={a[i]!r}, x={x[i]!r}, x'={y[i]!r}")


def lemma3(rng, samples, z=None):
    """inf phi1 = sup phi2 = 1 - e^-alpha, attained at x = 1 and x = 0."""
    a, x = _draw_alpha(rng, samples), _draw_x(rng, samples)
    edge = -np.expm1(-a)
    at_ends = (np.isclose(core.phi1(np.ones_like(a), a), edge, rtol=1e-14, atol=0.0)
               & np.isclose(core.phi2(np.zeros_like(a), a), edge, rtol=1e-14, atol=0.0))
    between = (core.phi1(x, a) > edge) & (core.phi2(x, a) < edge)
    return _result("lemma3_phi_bounds", at_ends & between,
                   lambda i: f"alpha={a[i]!r}, x={x[i]!r}")


def lemma4(rng, samples, z=None):
    """phi1 > alpha e^{-alpha x/2} and phi2 > alpha e^{-alpha (1+x)/2}."""
    a, x = _draw_alpha(rng, samples), _draw_x(rng, samples)
    ok = ((core.phi1(x, a) > a * np.exp(-a * x / 2.0))
          & (core.phi2(x, a) > a * np.exp(-a * (1.0 + x) / 2.0)))
    return _result("lemma4_phi_lower_bounds", ok, lambda i: f"alpha={a[i]!r}, x={x[i]!r}")


def lemma5(rng, samples, z=None):
    """phi1^g - phi2^g strictly decreases in x for g >= 2."""
    a, g = _draw_alpha(rng, samples), _draw_gamma(rng, samples, GAMMA_RANGE_L5[0])
    x, y = _ordered_pairs(rng, samples)

    def gap(t):
        return core.phi1(t, a) ** g - core.phi2(t, a) ** g

    return _result("lemma5_power_gap_decreasing", gap(x) > gap(y),
                   lambda i: f"alpha={a[i]!r}, gamma={g[i]!r}, x={x[i]!r}, x'={y[i]!r}")


def lemma6(rng, samples, z=None):
    """k1 > 0 and k1 + k2 > 0."""
    a, x = _draw_alpha(rng, samples), _draw_x(rng, samples)
    k1, k2 = core.lemma_k(x, a)
    return _result("lemma6_k_positive", (k1 > 0.0) & (k1 + k2 > 0.0),
                   lambda i: f"alpha={a[i]!r}, x={x[i]!r}")


def lemma7(rng, samples, z=None):
    """z strictly decreases in x."""
    z = z or core.z_fn
    a, g = _draw_alpha(rng, samples), _draw_gamma(rng, samples)
    x, y = _ordered_pairs(rng, samples)
    ok = np.array([z(x[i], a[i], g[i], normalized=True) > z(y[i], a[i], g[i], normalized=True)
                   for i in range(samples)])
    return _result("lemma7_z_decreasing", ok,
                   lambda i: f"alpha={a[i]!r}, gamma={g[i]!r}, x={x[i]!r}, x'={y[i]!r}")


def lemma8(rng, samples, z=None):
    """z > 0 near 0, z < 0 near 1, one sign change on a 1e-3 grid."""
    z = z or core.z_fn
    a, g = _draw_alpha(rng, samples), _draw_gamma(rng, samples)
    grid = np.linspace(1e-9, 1.0 - 1e-9, 1001)
    ok = np.empty(samples, dtype=bool)
    for i in range(samples):
        vals = np.asarray(z(grid, a[i], g[i], normalized=True))
        signs = np.sign(vals)
        changes = np.count_nonzero(np.diff(signs[signs != 0]) != 0)
        ok[i] = vals[0] > 0.0 and vals[-1] < 0.0 and changes == 1
    return _result("lemma8_z_single_root", ok, lambda i: f"alpha={a[i]!r}, gamma={g[i]!r}")


# ---------------------------------------------------------------------------
# solver invariants
# ---------------------------------------------------------------------------

def _draw_params(rng, warranty_fields=False):
    values = dict(
        alpha=float(_draw_alpha(rng, 1)[0]), gamma=float(_draw_gamma(rng, 1)[0]),
        c=float(rng.uniform(0.5, 2.0)), beta=float(rng.uniform(*BETA_RANGE)),
        r0=float(rng.uniform(*R_RANGE)), rm=float(rng.uniform(*R_RANGE)),
        n_periods=int(rng.choice(N_CHOICES)),
    )
    if warranty_fields:
        values.update(f0=float(rng.uniform(0.05, 0.3)), cw=float(rng.uniform(0.1, 0.5)),
                      d=float(rng.uniform(2.0, 10.0)), b=float(rng.uniform(1.0, 5.0)),
                      beta0=float(rng.uniform(0.1, 0.5)), beta1=float(rng.uniform(*BETA_RANGE)))
    return ModelParams(**values)


def _fd_normalized(f, p):
    """|d f/d p| * p / |f| by central difference with step 1e-6 p."""
    h = 1e-6 * p
    return abs(f(p + h) - f(p - h)) / (2.0 * h) * p / abs(f(p))


def _stage_fn(mass, disc, c, g, margin=0.0):
    return lambda p: p ** (-g) * ((p + margin) * mass - c * disc)


def stationarity(rng, samples, z=None, table_point=None):
    """First-order conditions hold at every closed-form stage price.

    Covers the continuous prices, the discrete WOM prices, and the prices
    with a warranty margin, one random draw of each per sample.
    """
    worst, labels = [], []
    for _ in range(samples):
        p = table_point if table_point is not None else _draw_params(rng, warranty_fields=True)
        theta = float(rng.uniform(0.01, 0.99))
        p1, p2 = continuous.optimal_prices_given_theta(p, theta)
        m1, d1, m2, d2 = continuous.stage_integrals(p, theta)
        devs = [_fd_normalized(_stage_fn(m1, d1, p.c, p.gamma), p1),
                _fd_normalized(_stage_fn(m2, d2, p.c, p.gamma), p2)]
        M = int(rng.integers(1, p.n_periods))
        q1, q2 = wom.discrete_prices(p, M)
        prof = wom.stage_profile(p, wom.period_weights(p))
        k = M - 1
        devs += [_fd_normalized(_stage_fn(prof.mass1[k], prof.disc1[k], p.c, p.gamma), q1),
                 _fd_normalized(_stage_fn(prof.mass2[k], prof.disc2[k], p.c, p.gamma), q2)]
        pw = float(rng.uniform(0.0, 1.0 / p.d))
        m = warranty.warranty_margin(p, pw)
        wprof = wom.stage_profile(p, warranty.warranty_weights(p, pw))
        w1 = wom.stage_prices(p, wprof.mass1[k], wprof.disc1[k], m)
        w2 = wom.stage_prices(p, wprof.mass2[k], wprof.disc2[k], m)
        if w1 > 0.0 and w2 > 0.0:
            devs += [_fd_normalized(_stage_fn(wprof.mass1[k], wprof.disc1[k], p.c, p.gamma, m), w1),
                     _fd_normalized(_stage_fn(wprof.mass2[k], wprof.disc2[k], p.c, p.gamma, m), w2)]
        worst.append(max(devs))
        labels.append(f"{p}, theta={theta!r}, M={M}, p_w={pw!r}")
    worst = np.array(worst)
    return _result("stationarity", worst < STATIONARITY_TOL,
                   lambda i: f"{labels[i]} (normalized slope {worst[i]:.3g})")


def price_order(rng, samples, z=None):
    """p1 > p2 for continuous prices and discrete WOM prices when alpha > 0."""
    ok, labels = [], []
    for _ in range(samples):
        p = _draw_params(rng)
        theta = float(rng.uniform(0.01, 0.99))
        M = int(rng.integers(1, p.n_periods))
        c1, c2 = continuous.optimal_prices_given_theta(p, theta)
        ok.append(c1 > c2 and wom.discrete_price_order_check(p, M))
        labels.append(f"{p}, theta={theta!r}, M={M}")
    return _result("price_order", ok, lambda i: labels[i])


def profit_unimodal(rng, samples, z=None):
    """Total profit over a 1e-3 theta grid rises then falls."""
    grid = np.arange(1, 1000) / 1000.0
    a, g = _draw_alpha(rng, samples), _draw_gamma(rng, samples)
    ok = np.array([is_unimodal(continuous.reduced_profit(grid, a[i], g[i]))
                   for i in range(samples)])
    return _result("profit_unimodal", ok, lambda i: f"alpha={a[i]!r}, gamma={g[i]!r}")


def profit_slope_sign(rng, samples, z=None):
    """sign(d pi0/d theta) matches sign(z) away from the root."""
    z = z or core.z_fn
    a, g = _draw_alpha(rng, samples), _draw_gamma(rng, samples)
    x = rng.uniform(0.01, 0.99, samples)
    ok = np.empty(samples, dtype=bool)
    for i in range(samples):
        h = 1e-6
        slope = (continuous.reduced_profit(x[i] + h, a[i], g[i])
                 - continuous.reduced_profit(x[i] - h, a[i], g[i])) / (2.0 * h)
        zi = z(x[i], a[i], g[i], normalized=True)
        root = continuous.solve_theta_star(ModelParams(alpha=a[i], gamma=g[i])).theta
        ok[i] = abs(x[i] - root) < 1e-3 or np.sign(slope) == np.sign(zi)
    return _result("profit_slope_sign", ok,
                   lambda i: f"alpha={a[i]!r}, gamma={g[i]!r}, theta={x[i]!r}")


def theorem4(rng, samples, z=None):
    """WOM gain predicate agrees with the direct profit comparison at the same M."""
    ok, labels = [], []
    for _ in range(samples):
        p = _draw_params(rng)
        M = int(rng.integers(1, p.n_periods))
        with_wom = wom.discrete_profits(p, M)[2]
        bench = wom.discrete_profits(p.replace(r0=p.rm), M)[2]
        ok.append(wom.wom_gain_condition(p, M) == (with_wom > bench))
        labels.append(f"{p}, M={M}")
    return _result("theorem4_vs_direct", ok, lambda i: labels[i])


def proposition2(rng, samples, z=None):
    """Whenever the overestimation condition holds, WOM gains (sufficiency)."""
    ok, labels = [], []
    for _ in range(samples):
        p = _draw_params(rng)
        lo, hi = sorted((p.r0, p.rm))
        p = p.replace(r0=max(hi, lo + 1e-3), rm=lo)
        M = int(rng.integers(1, p.n_periods))
        ok.append(not wom.oe_sufficient_condition(p, M) or wom.wom_gain_condition(p, M))
        labels.append(f"{p}, M={M}")
    return _result("proposition2_sufficiency", ok, lambda i: labels[i])


def reduction(rng, samples, z=None):
    """With r0 = rm the discrete model equals the continuous one at theta = M/N."""
    ok, labels = [], []
    for _ in range(samples):
        p = _draw_params(rng)
        p = p.replace(r0=p.rm)
        M = int(rng.integers(1, p.n_periods))
        theta = M / p.n_periods
        d1, d2 = wom.discrete_prices(p, M)
        c1, c2 = continuous.optimal_prices_given_theta(p, theta)
        dt = wom.discrete_profits(p, M)[2]
        ct = continuous.total_profit(p, theta)
        rel = max(abs(d1 - c1) / c1, abs(d2 - c2) / c2, abs(dt - ct) / abs(ct))
        ok.append(rel < REDUCTION_TOL)
        labels.append(f"{p}, M={M} (relative gap {rel:.3g})")
    return _result("reduction_r0_eq_rm", ok, lambda i: labels[i])


LEMMA_SUITES = (lemma1, lemma2, lemma3, lemma4, lemma5, lemma6, lemma7, lemma8)
SOLVER_SUITES = (stationarity, price_order, profit_unimodal, profit_slope_sign,
                 theorem4, proposition2, reduction)


def run_all(samples: int, seed: int, z: Optional[Callable] = None):
    """Run every suite with ``samples`` draws; suite k uses seed (seed, k).

    The fixed numerical-example parameter point is checked for stationarity
    in addition to the random draws.
    """
    results = []
    for k, suite in enumerate(LEMMA_SUITES + SOLVER_SUITES):
        rng = np.random.default_rng([seed, k])
        try:
            results.append(suite(rng, samples, z=z))
        except (DomainError, InfeasibleError, SolverError) as exc:
            # a solver refusing its inputs is itself a broken invariant
            results.append(PropertyResult(suite.__name__, samples, samples,
                                          f"{type(exc).__name__}: {exc}"))
    rng = np.random.default_rng([seed, len(results)])
    fixed = stationarity(rng, 1, table_point=table2_params())
    results.append(PropertyResult("stationarity_table_point", fixed.checked,
                                  fixed.failures, fixed.first_failure))
    return results


def sampling_ranges() -> str:
    return (f"alpha in [{ALPHA_RANGE[0]}, {ALPHA_RANGE[1]}], "
            f"gamma in ({GAMMA_RANGE[0]:g}, {GAMMA_RANGE[1]:g}] "
            f"([{GAMMA_RANGE_L5[0]:g}, {GAMMA_RANGE_L5[1]:g}] for lemma5), "
            f"beta in [{BETA_RANGE[0]}, {BETA_RANGE[1]}], "
            f"r0, rm in [{R_RANGE[0]}, {R_RANGE[1]}], N in {list(N_CHOICES)}")
