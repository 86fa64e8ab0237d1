"""Shared model primitives: secant slopes of the cost curve, the switching-time
sign function, WOM recursions and demand-density integrals.

All functions accept scalars or numpy arrays for their time argument.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .errors import DomainError
from .params import DemandDensity, ModelParams, WomTrajectory


def _as_array(x):
    return np.asarray(x, dtype=float)


def _unwrap(x, like):
    return float(x) if np.ndim(like) == 0 else x


def phi1(x, alpha):
    """Absolute slope of the secant of exp(-alpha t) over [0, x].

    Equals (1 - exp(-alpha x)) / x; tends to ``alpha`` as x -> 0.
    """
    xa = _as_array(x)
    if np.any(xa <= 0.0) or np.any(xa > 1.0):
        raise DomainError("phi1 needs 0 < x <= 1")
    out = -np.expm1(-alpha * xa) / xa
    return _unwrap(out, x)


def phi2(x, alpha):
    """Absolute slope of the secant of exp(-alpha t) over [x, 1]."""
    xa = _as_array(x)
    if np.any(xa < 0.0) or np.any(xa >= 1.0):
        raise DomainError("phi2 needs 0 <= x < 1")
    # e^{-ax} - e^{-a} written as e^{-ax}(1 - e^{-a(1-x)}) keeps precision near x -> 1
    out = -np.exp(-alpha * xa) * np.expm1(-alpha * (1.0 - xa)) / (1.0 - xa)
    return _unwrap(out, x)


def z_fn(x, alpha, gamma, normalized=False):
    """Sign function of the derivative of total profit in the switching time.

    z = (gamma-1) alpha e^{-alpha x} (phi1^gamma - phi2^gamma)
        - gamma (phi2 phi1^gamma - phi1 phi2^gamma)

    With ``normalized=True`` the value is divided by alpha**(gamma+1), which
    makes it O(1) whatever alpha is.
    """
    xa = _as_array(x)
    if np.any(xa <= 0.0) or np.any(xa >= 1.0):
        raise DomainError("z_fn needs 0 < x < 1")
    if alpha <= 0.0:
        raise DomainError("z_fn needs alpha > 0")
    u1 = phi1(xa, alpha) / alpha
    u2 = phi2(xa, alpha) / alpha
    p1, p2 = u1**gamma, u2**gamma
    out = (gamma - 1.0) * np.exp(-alpha * xa) * (p1 - p2) - gamma * (u2 * p1 - u1 * p2)
    if not normalized:
        out = out * alpha ** (gamma + 1.0)
    return _unwrap(out, x)


def _secant_gap(u):
    """g(u) = ((u - 2) + (u + 2) e^{-u}) / (2 u^2), positive for u > 0."""
    u = _as_array(u)
    out = np.empty_like(u)
    small = u < 0.5
    us = u[small]
    # series: sum_{k>=3} (-1)^{k+1} (k-2) u^k / k!, divided by 2u^2
    acc = np.zeros_like(us)
    term = np.ones_like(us) / 6.0  # u^{k-2}/k! at k = 3, times u
    term = term * us
    for k in range(3, 30):
        acc += (-1) ** (k + 1) * (k - 2) * term
        term = term * us / (k + 1)
    out[small] = acc / 2.0
    ul = u[~small]
    out[~small] = ((ul - 2.0) + (ul + 2.0) * np.exp(-ul)) / (2.0 * ul * ul)
    return out


def lemma_k(x, alpha):
    """The pair (k1, k2) whose sum controls the curvature argument for z.

    k1(x) = alpha phi1 / 2 - (phi1 - alpha e^{-alpha x}) / x
    k2(x) = -alpha phi2 / 2 + (alpha e^{-alpha x} - phi2) / (1 - x)

    Both are evaluated through the cancellation-free identities
    k1 = alpha^2 g(alpha x) and k2 = alpha^2 e^{-alpha x} g(alpha (1 - x)).
    """
    xa = _as_array(x)
    if np.any(xa <= 0.0) or np.any(xa >= 1.0):
        raise DomainError("lemma_k needs 0 < x < 1")
    k1 = alpha**2 * _secant_gap(alpha * xa)
    k2 = alpha**2 * np.exp(-alpha * xa) * _secant_gap(alpha * (1.0 - xa))
    return _unwrap(k1, x), _unwrap(k2, x)


def lemma_k_direct(x, alpha):
    """(k1, k2) evaluated literally; loses digits when alpha*x is small."""
    xa = _as_array(x)
    f1, f2 = phi1(xa, alpha), phi2(xa, alpha)
    e = np.exp(-alpha * xa)
    k1 = alpha * f1 / 2.0 - (f1 - alpha * e) / xa
    k2 = -alpha * f2 / 2.0 + (alpha * e - f2) / (1.0 - xa)
    return _unwrap(k1, x), _unwrap(k2, x)


# ---------------------------------------------------------------------------
# word of mouth
# ---------------------------------------------------------------------------

def wom_path(r0, rm, beta, n_periods):
    """Perceived reliability r_c(1..N) under exponential smoothing.

    r_c(1) = r0 and r_c(j) = beta r_c(j-1) + (1 - beta) rm, evaluated in the
    unrolled form rm + beta^(j-1) (r0 - rm).
    """
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if n_periods < 1:
        raise DomainError("n_periods must be >= 1")
    j = np.arange(n_periods)
    values = rm + beta**j * (r0 - rm)
    values[0] = r0
    return WomTrajectory(values=values, beta_used=beta, first_index=1)


def warranty_initial_perception(params: ModelParams, p_w):
    """Pre-launch perception once the warranty price is announced."""
    params.require_warranty()
    if p_w < 0.0 or p_w > 1.0 / params.d:
        raise DomainError(f"p_w must lie in [0, 1/d] = [0, {1.0 / params.d:.6g}], got {p_w}")
    # with a = (1 - beta0 r0)/(1 - beta0) the r0 terms cancel:
    # beta0 r0 + (1 - beta0)(a - b p_w) = 1 - (1 - beta0) b p_w
    return 1.0 - (1.0 - params.beta0) * params.b * p_w


def wom_path_with_warranty(params: ModelParams, p_w):
    """Perceived reliability r_c(0..N) when an extended warranty is sold.

    Index 0 is the pre-launch perception, which equals 1 for a free warranty;
    index i >= 1 applies to sales period i.
    """
    rc0 = warranty_initial_perception(params, p_w)
    i = np.arange(params.n_periods + 1)
    values = params.rm + params.beta1**i * (rc0 - params.rm)
    values[0] = rc0
    return WomTrajectory(values=values, beta_used=params.beta1, first_index=0)


# ---------------------------------------------------------------------------
# demand density integrals
# ---------------------------------------------------------------------------

def _check_bounds(t0, t1):
    if not (0.0 <= t0 <= t1 <= 1.0):
        raise DomainError(f"need 0 <= t0 <= t1 <= 1, got [{t0}, {t1}]")


def _normal_norm(density):
    mu, s = density.mu, density.sigma
    return ndtr((1.0 - mu) / s) - ndtr(-mu / s)


def _mass(density, t0, t1):
    if density.is_uniform:
        return t1 - t0
    mu, s = density.mu, density.sigma
    return (ndtr((t1 - mu) / s) - ndtr((t0 - mu) / s)) / _normal_norm(density)


def _discounted(density, t0, t1, alpha):
    if alpha == 0.0:
        return _mass(density, t0, t1)
    if density.is_uniform:
        return np.exp(-alpha * t0) * -np.expm1(-alpha * (t1 - t0)) / alpha
    mu, s = density.mu, density.sigma
    # complete the square: N(mu, s) e^{-alpha t} = e^{-alpha mu + alpha^2 s^2 / 2} N(mu - alpha s^2, s)
    shift = mu - alpha * s * s
    scale = math.exp(-alpha * mu + 0.5 * (alpha * s) ** 2)
    return scale * (ndtr((t1 - shift) / s) - ndtr((t0 - shift) / s)) / _normal_norm(density)


def density_pdf(density: DemandDensity, t):
    t = _as_array(t)
    if density.is_uniform:
        return np.ones_like(t)
    mu, s = density.mu, density.sigma
    return np.exp(-0.5 * ((t - mu) / s) ** 2) / (s * math.sqrt(2 * math.pi) * _normal_norm(density))


def density_mass(density: DemandDensity, t0, t1) -> float:
    """Probability mass of demand falling in [t0, t1]."""
    _check_bounds(t0, t1)
    return float(_mass(density, t0, t1))


def discounted_density_mass(density: DemandDensity, t0, t1, alpha) -> float:
    """Integral of lambda(t) exp(-alpha t) over [t0, t1]."""
    _check_bounds(t0, t1)
    if alpha < 0.0:
        raise DomainError("alpha must be >= 0")
    return float(_discounted(density, t0, t1, alpha))


def period_masses(density: DemandDensity, n_periods: int, alpha: float):
    """Per-period demand mass and discounted-cost mass for periods 1..N.

    Period j covers [(j-1)/N, j/N].  Returns two arrays of length N.
    """
    if density.is_uniform:
        mass = np.full(n_periods, 1.0 / n_periods)
        if alpha == 0.0:
            return mass, mass.copy()
        start = np.arange(n_periods) / n_periods
        disc = np.exp(-alpha * start) * (-math.expm1(-alpha / n_periods) / alpha)
        return mass, disc
    edges = np.arange(n_periods + 1) / n_periods
    mass = np.diff(_mass(density, 0.0, edges))
    disc = np.diff(_discounted(density, 0.0, edges, alpha))
    return mass, disc
