"""Model parameters, the sales-time demand density and WOM trajectories."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError


class DensityKind(str, enum.Enum):
    UNIFORM = "uniform"
    TRUNCATED_NORMAL = "truncnorm"


@dataclass(frozen=True)
class DemandDensity:
    """Density of demand over the normalized sales horizon [0, 1].

    The truncated-normal variant is renormalized on [0, 1]; ``mu`` and
    ``sigma`` are ignored for the uniform density.
    """

    kind: DensityKind = DensityKind.UNIFORM
    mu: float = 0.5
    sigma: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "kind", DensityKind(self.kind))
        if self.kind is DensityKind.TRUNCATED_NORMAL:
            if not 0.0 <= self.mu <= 1.0:
                raise DomainError(f"density mu must lie in [0, 1], got {self.mu}")
            if not self.sigma > 0.0:
                raise DomainError(f"density sigma must be > 0, got {self.sigma}")

    @classmethod
    def uniform(cls) -> "DemandDensity":
        return cls(DensityKind.UNIFORM)

    @classmethod
    def truncated_normal(cls, mu: float = 0.5, sigma: float = 0.2) -> "DemandDensity":
        return cls(DensityKind.TRUNCATED_NORMAL, mu, sigma)

    @property
    def is_uniform(self) -> bool:
        return self.kind is DensityKind.UNIFORM


UNIFORM = DemandDensity()


def _check_unit(name, value, *, open_interval=False):
    if open_interval:
        if not 0.0 < value < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {value}")
    elif not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class ModelParams:
    """All scalar inputs of the pricing model.

    The warranty fields (``f0``, ``cw``, ``d``, ``b``, ``beta0``, ``beta1``)
    may be left as ``None`` when only the no-warranty solvers are used.
    """

    alpha: float
    gamma: float
    c: float = 1.0
    beta: float = 0.5
    r0: float = 0.8
    rm: float = 0.8
    n_periods: int = 200
    f0: Optional[float] = None
    cw: Optional[float] = None
    d: Optional[float] = None
    b: Optional[float] = None
    beta0: Optional[float] = None
    beta1: Optional[float] = None
    density: DemandDensity = field(default=UNIFORM)

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not (math.isfinite(self.gamma) and self.gamma > 1.0):
            raise DomainError(f"gamma must be > 1 (price elasticity exponent), got {self.gamma}")
        if not self.c > 0.0:
            raise DomainError(f"c must be > 0, got {self.c}")
        _check_unit("beta", self.beta, open_interval=True)
        _check_unit("r0", self.r0)
        _check_unit("rm", self.rm)
        if int(self.n_periods) != self.n_periods or self.n_periods < 2:
            raise DomainError(f"n_periods must be an integer >= 2, got {self.n_periods}")
        object.__setattr__(self, "n_periods", int(self.n_periods))
        if self.f0 is not None:
            _check_unit("f0", self.f0)
        if self.cw is not None and self.cw < 0.0:
            raise DomainError(f"cw must be >= 0, got {self.cw}")
        for name in ("d", "b"):
            value = getattr(self, name)
            if value is not None and not value > 0.0:
                raise DomainError(f"{name} must be > 0, got {value}")
        for name in ("beta0", "beta1"):
            value = getattr(self, name)
            if value is not None:
                _check_unit(name, value, open_interval=True)

    @property
    def has_warranty(self) -> bool:
        return None not in (self.f0, self.cw, self.d, self.b, self.beta0, self.beta1)

    def require_warranty(self) -> None:
        missing = [
            name
            for name in ("f0", "cw", "d", "b", "beta0", "beta1")
            if getattr(self, name) is None
        ]
        if missing:
            raise DomainError("warranty model needs " + ", ".join(missing))

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    @property
    def single_price(self) -> float:
        """Optimal constant price c*gamma/(gamma-1), the no-learning limit."""
        return self.c * self.gamma / (self.gamma - 1.0)


def table2_params(**overrides) -> ModelParams:
    """Numerical setting of the extended model (warranty example).

    The source leaves ``rm`` and the no-warranty smoothing factor unstated;
    ``rm = 0.75`` and ``beta = beta1`` reproduce the four-case comparison.
    """
    values = dict(
        alpha=0.1, gamma=3.0, c=1.0, beta=0.5, r0=0.8, rm=0.75, n_periods=200,
        f0=0.1, cw=0.2, d=5.0, b=5.0, beta0=0.2, beta1=0.5,
    )
    values.update(overrides)
    return ModelParams(**values)


@dataclass(frozen=True)
class WomTrajectory:
    """Perceived-reliability path.

    ``values[k]`` is the perception with index ``first_index + k``.  The
    plain WOM recursion starts at period 1; the warranty recursion starts at
    the pre-launch index 0.
    """

    values: np.ndarray
    beta_used: float
    first_index: int = 1

    def period_values(self) -> np.ndarray:
        """Perceptions applying to sales periods 1..N."""
        return self.values[1 - self.first_index:]

    def __len__(self):
        return len(self.values)


SWEEP_AXES = ("alpha", "gamma", "c", "r0", "beta", "N")


def apply_axis(params: ModelParams, axis: str, value) -> ModelParams:
    """Copy of ``params`` with one sweep axis set.

    ``beta`` sets both the plain smoothing factor and the post-launch
    warranty-model factor; ``N`` sets the number of periods.
    """
    if axis not in SWEEP_AXES:
        raise DomainError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    if axis == "N":
        return params.replace(n_periods=int(round(value)))
    if axis == "beta":
        changes = {"beta": float(value)}
        if params.beta1 is not None:
            changes["beta1"] = float(value)
        return params.replace(**changes)
    return params.replace(**{axis: float(value)})
