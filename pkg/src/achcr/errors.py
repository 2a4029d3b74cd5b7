"""Exception hierarchy.

Every failure the engine can report is a subclass of :class:`AchError`.
The CLI maps the three families below to distinct exit codes.
"""

from __future__ import annotations

__all__ = [
    "AchError",
    "ValidationError",
    "SolverError",
    "ParseError",
    "DivisionByZero",
    "KindMismatch",
    "TruncationMismatch",
    "NotInvertible",
    "DegenerateLeviForm",
    "NonzeroLeadingCoefficient",
    "JacobiViolation",
    "NotAdapted",
    "NotPartiallyIntegrable",
    "AsymmetricMu",
    "DegenerateDeformation",
    "InconsistentStructureEquation",
    "UnderdeterminedConnection",
    "NormalFormViolation",
    "TruncationTooSmall",
    "IndicialSingular",
    "FloorAssertFailed",
    "BianchiAssertFailed",
    "KillFailed",
    "DegreeBoundExceeded",
    "BadParameter",
    "UnknownExample",
]


class AchError(Exception):
    """Base class."""


class ValidationError(AchError):
    """Bad input: malformed algebra, tensor or parameter."""


class SolverError(AchError):
    """The formal solver could not proceed."""


class ParseError(AchError):
    """Input text could not be decoded."""


class DivisionByZero(AchError, ZeroDivisionError):
    pass


class KindMismatch(ValidationError):
    pass


class TruncationMismatch(ValidationError):
    pass


class NotInvertible(ValidationError):
    pass


class DegenerateLeviForm(ValidationError):
    pass


class NonzeroLeadingCoefficient(ValidationError):
    pass


class JacobiViolation(ValidationError):
    pass


class NotAdapted(ValidationError):
    pass


class NotPartiallyIntegrable(ValidationError):
    pass


class AsymmetricMu(ValidationError):
    pass


class DegenerateDeformation(ValidationError):
    pass


class InconsistentStructureEquation(ValidationError):
    pass


class UnderdeterminedConnection(ValidationError):
    pass


class NormalFormViolation(ValidationError):
    pass


class BadParameter(ValidationError):
    pass


class UnknownExample(ValidationError):
    pass


class TruncationTooSmall(SolverError):
    pass


class IndicialSingular(SolverError):
    pass


class FloorAssertFailed(SolverError):
    pass


class BianchiAssertFailed(SolverError):
    pass


class KillFailed(SolverError):
    """A correction did not remove the targeted coefficient."""


class DegreeBoundExceeded(SolverError):
    pass
