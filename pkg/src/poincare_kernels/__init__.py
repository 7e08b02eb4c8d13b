"""Automorphic kernel toolbox for the weight-k hyperbolic Laplacian.

Point-pair kernels (resolvent, heat, Poisson and the geometric series),
their spectral transforms, and the modular-group machinery (ball
enumeration, eta-power multiplier systems) needed to sum them.
"""

from . import cli, fuchsian, geom, kernels, shc, specfun
from .core import backend_name
from .errors import (
    BudgetExceeded,
    ClassViolation,
    ConsistencyError,
    ConventionError,
    ConvergenceError,
    DomainError,
    NoConvergence,
    PoincareKernelsError,
    PoleError,
    QuadratureFailure,
    SingularityError,
    UnknownSuite,
)

__version__ = "0.1.0"

__all__ = [
    "specfun",
    "geom",
    "fuchsian",
    "shc",
    "kernels",
    "cli",
    "backend_name",
    "PoincareKernelsError",
    "DomainError",
    "PoleError",
    "NoConvergence",
    "ConsistencyError",
    "ConventionError",
    "BudgetExceeded",
    "QuadratureFailure",
    "SingularityError",
    "ConvergenceError",
    "ClassViolation",
    "UnknownSuite",
    "__version__",
]
