"""Exception taxonomy shared by all modules.

Every exception raised on purpose by this package derives from
:class:`PoincareKernelsError`, so callers can catch the library's failures
without swallowing genuine bugs.
"""


class PoincareKernelsError(Exception):
    """Base class for all errors raised by poincare_kernels."""


class DomainError(PoincareKernelsError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PoleError(PoincareKernelsError, ValueError):
    """Evaluation was requested at (or within tolerance of) a pole."""


class NoConvergence(PoincareKernelsError, RuntimeError):
    """A series failed to reach the requested tolerance within its budget."""


class ConsistencyError(PoincareKernelsError, RuntimeError):
    """Two internal evaluation routes that must agree did not."""


class ConventionError(PoincareKernelsError, RuntimeError):
    """No sign convention satisfies the required consistency relations."""


class BudgetExceeded(PoincareKernelsError, RuntimeError):
    """An enumeration grew past its configured candidate cap."""


class QuadratureFailure(PoincareKernelsError, RuntimeError):
    """Numerical integration could not certify the requested accuracy.

    The achieved error estimate, when available, is stored in
    ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class SingularityError(PoincareKernelsError, ValueError):
    """Evaluation was requested on (or too close to) a singular locus."""


class ConvergenceError(PoincareKernelsError, ValueError):
    """Parameters lie outside the region where the defining sum converges."""


class ClassViolation(PoincareKernelsError, RuntimeError):
    """A function failed the smoothness/decay class it was declared in."""


class UnknownSuite(PoincareKernelsError, KeyError):
    """An unrecognized check-suite name was requested."""
