"""Exception types shared across the calibration engine."""


class CalibrationError(Exception):
    """Base class for errors raised by this package."""


class AlignmentError(CalibrationError, ValueError):
    """Model outputs and targets (or parameter vectors) do not line up."""


class EvaluationError(CalibrationError, ValueError):
    """A model evaluation produced a non-finite or otherwise unusable value."""


class ParseError(CalibrationError, ValueError):
    """A data or chain file could not be parsed; carries the offending location."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class ConfigurationError(CalibrationError, ValueError):
    """A run configuration is invalid; raised before any computation starts."""


class InfeasibleParametersError(CalibrationError, ValueError):
    """Parameters produce an invalid model instance (e.g. transition row > 1).

    The sampler treats this as a zero-likelihood proposal rather than a crash.
    """


class InsufficientChainsError(CalibrationError, ValueError):
    """A multi-chain diagnostic was asked to run on fewer than two chains."""


class DegenerateChainError(CalibrationError, ValueError):
    """A chain is constant (zero variance) where a diagnostic needs spread."""


class InitializationError(CalibrationError, ValueError):
    """A chain was asked to start from a state with non-finite log-posterior."""


class NumericalError(CalibrationError, ArithmeticError):
    """An integrator or accumulator left the finite range; names the step."""
