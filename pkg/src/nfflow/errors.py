"""Exception types raised across the package."""


class NFFlowError(Exception):
    """Base class for all package errors."""


class ConservationViolated(NFFlowError):
    """Arc flow does not satisfy flow conservation."""


class DisconnectedArc(NFFlowError):
    """No source-sink path passes through the requested arc."""


class DualInfeasibleInput(NFFlowError):
    """A dual vector violates the path dual constraints."""


class MasterInfeasible(NFFlowError):
    """Artificial columns remain at a positive level after column generation."""


class UnsafeDual(NFFlowError):
    """Variable fixing was requested with a dual that is not proven feasible."""


class TimeLimit(NFFlowError):
    """The time budget was exhausted."""


class ParseError(NFFlowError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(NFFlowError):
    """Instance data outside the allowed domain."""


class InfeasibleBudget(NFFlowError):
    """The waste budget is negative: no solution improves on the upper bound."""


class UnsupportedKind(NFFlowError):
    """Unknown or inapplicable arc family kind."""


class TooLarge(NFFlowError):
    """Instance too large for the exhaustive oracle."""
