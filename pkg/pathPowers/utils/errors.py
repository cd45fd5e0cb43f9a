# utils/errors.py
"""
Exception hierarchy shared by every package. Each class carries the process
exit status the command-line driver reports for it.
"""
from typing import Optional, Tuple


class PathPowerError(Exception):
    """Base class for all library errors."""
    exit_code = 1


class InvalidParameterError(PathPowerError, ValueError):
    exit_code = 2


class InvalidVertexError(PathPowerError, ValueError):
    exit_code = 2


class InvalidOrderingError(PathPowerError, ValueError):
    exit_code = 2


class UnsupportedStorageError(PathPowerError, TypeError):
    exit_code = 2


class UsageError(PathPowerError):
    exit_code = 2


class ParseError(PathPowerError, ValueError):
    """Malformed tournament, witness or certificate text."""
    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(PathPowerError):
    """An exhaustive routine was asked to run beyond its configured cap."""
    exit_code = 3


class VerificationError(PathPowerError):
    """A witness or certificate failed its independent check."""
    exit_code = 4


class RotationPreconditionError(PathPowerError):
    """The three positions to rotate do not form a directed 3-cycle."""

    def __init__(self, missing_edge: Tuple[int, int]):
        self.missing_edge = missing_edge
        super().__init__(
            f"rotation needs edge {missing_edge[0]}->{missing_edge[1]}, "
            "which is absent"
        )


class NotLocallyOptimalError(PathPowerError):
    pass


class PreconditionError(PathPowerError):
    """A documented precondition of an operation does not hold."""

    def __init__(self, message: str, vertex: Optional[int] = None):
        self.vertex = vertex
        super().__init__(message)


class NotFoundError(PathPowerError):
    pass


class InsufficientTransitiveError(PathPowerError):
    pass


class StepFailedError(PathPowerError):
    pass


class InternalContractError(PathPowerError):
    """A guarantee that the underlying mathematics promises was violated."""
    pass


class InvalidCertificateError(PathPowerError, ValueError):
    exit_code = 2
