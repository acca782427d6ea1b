"""Exception hierarchy shared by all modules."""


class BlockadeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(BlockadeError, ValueError):
    """Bad input: wrong shape, wrong dimension, malformed config."""


class InvalidDimensionError(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


class InvalidHamiltonianError(ValidationError):
    pass


class UnsupportedAsymmetryError(ValidationError):
    """A closed-form path was asked to handle kappa_a != kappa_b or E_L != E_R."""


class ConfigError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SolverError(BlockadeError, ArithmeticError):
    """Numerical failure: singular systems, undefined ratios, unstable steps."""


class NonUniqueSteadyStateError(SolverError):
    def __init__(self, message, null_dim=None):
        self.null_dim = null_dim
        super().__init__(message)


class EmptyModeError(SolverError):
    pass


class StepSizeError(SolverError):
    pass


class ResonanceSingularityError(SolverError):
    def __init__(self, message, block=None):
        self.block = block
        super().__init__(message)


class SingularDenominatorError(SolverError):
    pass


class NoOptimumError(SolverError):
    pass


class UndefinedCorrelationError(SolverError):
    """g2 requested for a mode whose one-photon amplitude vanishes."""
