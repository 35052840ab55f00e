"""Exception hierarchy shared by all modules."""


class WernerQFIError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(WernerQFIError, ValueError):
    """Malformed input: wrong shape, non-Hermitian matrix, bad POVM, ..."""


class DimensionError(ValidationError):
    """Operand dimensions are incompatible."""


class DomainError(WernerQFIError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class ParameterError(DomainError):
    """Mixing parameter theta outside the half-open interval [0, 1)."""


class CapacityError(WernerQFIError):
    """Requested dense realization exceeds the configured dimension cap."""


class ConvergenceError(WernerQFIError, RuntimeError):
    """Adaptive quadrature did not reach its tolerance within the panel budget."""

    def __init__(self, message, residual, panels):
        super().__init__(f"{message} (achieved residual {residual:.3e} with {panels} panels)")
        self.residual = residual
        self.panels = panels


class IllPosedMeasurementError(DomainError):
    """An outcome with vanishing probability has non-vanishing derivative."""


class UninformativeMeasurementError(DomainError):
    """Measurement carries zero classical Fisher information."""
