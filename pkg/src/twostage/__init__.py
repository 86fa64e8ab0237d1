"""Two-stage markdown pricing under learning effects, word of mouth and an
optional extended warranty."""

from .continuous import (
    TwoStageSolution,
    optimal_prices_given_theta,
    solve_theta_star,
    sweep_observations,
    total_profit,
)
from .core import phi1, phi2, wom_path, wom_path_with_warranty, z_fn
from .errors import ConfigError, DomainError, InfeasibleError, SolverError
from .params import DemandDensity, ModelParams, table2_params
from .warranty import WarrantySolution, case_comparison, solve_joint, solve_warranty_continuous
from .wom import convergence_ratio, discrete_prices, discrete_profits, solve_M_star

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DemandDensity", "DomainError", "InfeasibleError", "ModelParams",
    "SolverError", "TwoStageSolution", "WarrantySolution", "case_comparison",
    "convergence_ratio", "discrete_prices", "discrete_profits", "optimal_prices_given_theta",
    "phi1", "phi2", "solve_M_star", "solve_joint", "solve_theta_star",
    "solve_warranty_continuous", "sweep_observations", "table2_params", "total_profit",
    "wom_path", "wom_path_with_warranty", "z_fn",
]
