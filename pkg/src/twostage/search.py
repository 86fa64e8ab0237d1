"""One-dimensional searches used by the solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InfeasibleError, SolverError


def bisect_decreasing(f, lo, hi, xtol=1e-12, ftol=0.0, max_iter=200):
    """Root of a strictly decreasing function with f(lo) > 0 > f(hi).

    Stops once the bracket is narrower than ``xtol`` or ``|f| <= ftol``.
    """
    flo, fhi = f(lo), f(hi)
    if not (flo > 0.0 and fhi < 0.0):
        raise SolverError(
            f"no sign change on [{lo:.3g}, {hi:.3g}]: f(lo)={flo:.3g}, f(hi)={fhi:.3g}"
        )
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or abs(fm) <= ftol:
            return mid
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def is_unimodal(values) -> bool:
    """True when the finite part of ``values`` rises then falls (at most once)."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    steps = np.sign(np.diff(v))
    steps = steps[steps != 0]
    changes = np.count_nonzero(np.diff(steps) != 0)
    return bool(changes == 0 or (changes == 1 and steps[0] > 0))


@dataclass(frozen=True)
class ScalarMax:
    x: float
    value: float
    unimodal: bool


def maximize_unimodal(f, lo, hi, n_coarse=50, xtol=1e-9, fallback_step=1e-4):
    """Maximize a scalar function expected to be unimodal on [lo, hi].

    A coarse grid checks the shape first.  If it rises then falls the best
    coarse cell is refined with a bounded Brent search; otherwise a fine grid
    of ``fallback_step`` locates the best cell before refining.  Points where
    ``f`` is -inf count as infeasible.
    """
    xs = np.linspace(lo, hi, n_coarse)
    fs = np.array([f(x) for x in xs])
    unimodal = is_unimodal(fs)
    if not unimodal:
        xs = np.arange(lo, hi + 0.5 * fallback_step, fallback_step)
        xs[-1] = min(xs[-1], hi)
        fs = np.array([f(x) for x in xs])
    if not np.any(np.isfinite(fs)):
        raise InfeasibleError("objective is infeasible on the whole search interval")
    k = int(np.nanargmax(np.where(np.isfinite(fs), fs, -np.inf)))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, len(xs) - 1)]
    best_x, best_f = float(xs[k]), float(fs[k])
    if b > a:
        def neg(x):
            v = f(x)
            # keep Brent's parabola arithmetic finite at infeasible points
            return -v if np.isfinite(v) else np.finfo(float).max

        res = minimize_scalar(neg, bounds=(a, b), method="bounded",
                              options={"xatol": xtol})
        if res.fun < np.finfo(float).max and -res.fun > best_f:
            best_x, best_f = float(res.x), float(-res.fun)
    return ScalarMax(best_x, best_f, unimodal)
