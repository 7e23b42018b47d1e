"""Exception hierarchy shared by all modules.

Two broad families map onto the CLI exit codes: ValidationError (bad inputs
or configuration, exit 1) and NumericalError (a computation that cannot
produce a trustworthy result, exit 2).
"""


class SpatialEntError(Exception):
    """Base class for all package errors."""


class ValidationError(SpatialEntError, ValueError):
    """Invalid input, geometry, or configuration."""


class NumericalError(SpatialEntError, ArithmeticError):
    """A numerical procedure failed or its preconditions do not hold."""


class NonFiniteInputError(ValidationError):
    """An input carries NaN or infinity."""


class MalformedCovarianceError(NumericalError):
    """Covariance-matrix invariants are violated beyond tolerance."""


class UnphysicalStateError(NumericalError):
    """The state fails the uncertainty relation needed for this operation."""


class ChemicalPotentialError(ValidationError):
    """Chemical potential does not sit strictly below the mode energy."""


class DegenerateModeError(ValidationError):
    """All overlap coefficients vanish; no spatial mode can be built."""


class TruncationMismatchError(ValidationError):
    """Two mode vectors do not share the same truncation window."""


class OrthogonalizationError(ValidationError):
    """Mode vectors are (anti)parallel and cannot be orthogonalized."""


class DivergentSeriesError(NumericalError):
    """A covariance entry's mode sum does not converge.

    Carries the offending assembly report in ``report`` so callers can
    inspect per-entry flags.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
