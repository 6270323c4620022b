"""Exception hierarchy shared by every module."""


class FrameSplitError(Exception):
    """Base class for all errors raised by framesplit."""


class UsageError(FrameSplitError, ValueError):
    """Caller passed arguments with incompatible shapes or out-of-range values."""


class DomainError(FrameSplitError, ValueError):
    """A scalar function was evaluated outside its domain in spectral calculus."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class EigenSolverError(FrameSplitError, ArithmeticError):
    """The Hermitian eigensolver failed to converge or missed its residual bound."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class NotHermitianError(FrameSplitError, ValueError):
    pass


class NotAFrameError(FrameSplitError, ValueError):
    """The vectors do not span the space with an acceptable lower bound."""


class PreconditionError(FrameSplitError, ValueError):
    """Inputs are well formed but violate a mathematical hypothesis of a check."""


class GenerationError(FrameSplitError, RuntimeError):
    pass


class FormatError(FrameSplitError, ValueError):
    """Malformed frame JSON or subset notation."""
