"""Exception hierarchy shared by every subsystem.

Numerical preconditions raise subclasses of ``ValueError`` so callers that
already catch ``ValueError`` keep working.  Resource limits raise
``RuntimeError`` subclasses.  The CLI maps these onto exit codes:

    ConfigError          -> 2
    BudgetExceededError  -> 3
"""


class KineticError(ValueError):
    """Base class for invalid numerical input."""


class DomainError(KineticError):
    """Argument outside the domain of a map (|y| >= c, x = 0, ...)."""


class DegenerateError(KineticError):
    """Quantity undefined at a degenerate configuration (g = 0, frame pole)."""


class ParameterError(KineticError):
    """Parameter outside its admissible range or unknown registry key."""


class MissingDerivativeError(KineticError):
    """A derivative oracle lacks a component the operation needs."""


class FitError(KineticError):
    """Regression input unusable (non-positive values, too few points)."""


class SamplerError(KineticError):
    """Initial distribution cannot be normalised or sampled."""


class ConfigError(KineticError):
    """Run configuration violates the schema."""


class BudgetExceededError(RuntimeError):
    """A quadrature node budget or wall-time limit was exceeded."""


class MajorantOverflowError(RuntimeError):
    """DSMC acceptance probability would exceed one."""
