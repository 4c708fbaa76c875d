"""Four-body trapezoidal central configurations in mutual-distance variables."""

__version__ = "0.1.0"

from .ccsystem import CCSolution, MassVector, Multipliers, evaluate, lambda_dziobek, mass_ratios
from .config import RunConfig, ScanConfig, Tolerances
from .geometry import DistanceVector, TrapezoidShape, check_omega, embed, trapezoid_distances
from .golden import golden
from .solver import scan_family, solve_b, solve_equal_mass

__all__ = [
    "CCSolution", "DistanceVector", "MassVector", "Multipliers", "RunConfig", "ScanConfig",
    "Tolerances", "TrapezoidShape", "check_omega", "embed", "evaluate", "golden",
    "lambda_dziobek", "mass_ratios", "scan_family", "solve_b", "solve_equal_mass",
    "trapezoid_distances",
]
