"""Exception hierarchy shared by every module."""

from __future__ import annotations


class TwistCodesError(Exception):
    """Base class for all library errors."""


class DivisionByZero(TwistCodesError, ZeroDivisionError):
    pass


class LevelMismatch(TwistCodesError, ValueError):
    pass


class NotFound(TwistCodesError, LookupError):
    pass


class NotIrreducible(TwistCodesError, ValueError):
    pass


class ModulusMismatch(TwistCodesError, ValueError):
    pass


class DuplicatePoints(TwistCodesError, ValueError):
    pass


class DependentPoints(TwistCodesError, ValueError):
    pass


class BadDimension(TwistCodesError, ValueError):
    pass


class DegreeTooSmall(TwistCodesError, ValueError):
    pass


class BudgetExceeded(TwistCodesError, RuntimeError):
    pass


class BadEta(TwistCodesError, ValueError):
    pass


class BadTwist(TwistCodesError, ValueError):
    pass


class LengthMismatch(TwistCodesError, ValueError):
    pass


class BadDistance(TwistCodesError, ValueError):
    pass


class ShapeMismatch(TwistCodesError, ValueError):
    pass


class ProfileViolation(TwistCodesError, ValueError):
    pass


class EliminationFailure(TwistCodesError, ArithmeticError):
    pass


class FieldTooSmall(TwistCodesError, ValueError):
    pass


class ShapeNotAchieved(TwistCodesError, ValueError):
    """A basis codeword leaves the requested diagram; ``witness`` holds it."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
