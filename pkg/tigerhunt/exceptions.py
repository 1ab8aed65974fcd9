class TigerhuntError(Exception):
    pass


class ComputationError(TigerhuntError):
    """Raised when an engine computation cannot be completed."""

    def __init__(self, message="", *, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InputError(TigerhuntError, ValueError):
    """Raised for malformed user input (programs, boundaries, arguments)."""


class SingularMatrix(ComputationError):
    pass


class NotSymmetric(ComputationError):
    pass


class NonIntegral(ComputationError):
    pass


class GuardExceeded(ComputationError):
    pass


class InconsistentCenter(ComputationError):
    pass


class NotMinusOne(ComputationError):
    pass


class NotNegativeDefinite(ComputationError):
    pass


class NotLogTerminal(ComputationError):
    pass


class UnrecognizedGraph(ComputationError):
    pass


class NonFiniteContact(ComputationError):
    pass


class MultiplePoints(ComputationError):
    pass


class SmoothSurface(ComputationError):
    pass


class RayNotNegative(ComputationError):
    pass


class DegenerateRay(ComputationError):
    pass


class ContractionNotLT(ComputationError):
    pass


class MonotonicityViolation(ComputationError):
    pass


class ScaleOutOfRange(ComputationError):
    pass


class FlushnessLost(ComputationError):
    pass


class PushforwardMismatch(ComputationError):
    pass


class InconsistentVerdict(ComputationError):
    pass


class UnresolvedRay(ComputationError):
    pass


class BuildFailure(ComputationError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        if line is not None:
            message = "line {}: {}".format(line, message)
        super().__init__(message)
        self.line = line


class UnknownCurve(InputError):
    def __init__(self, curve, line=None):
        message = "unknown curve {!r}".format(curve)
        if line is not None:
            message = "line {}: {}".format(line, message)
        super().__init__(message)
        self.curve = curve
        self.line = line


class ContactExceedsIntersection(InputError):
    pass


class InvalidBoundary(InputError):
    pass
