"""Exception hierarchy shared by every module of the package."""


class PslError(Exception):
    """Base class of all errors raised by psl."""


class InputError(PslError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class UnsupportedMode(PslError):
    """A mode that cannot be applied to the given object (CLI exit code 3)."""


# rings
class NotPrime(InputError):
    pass


class NotMonic(InputError):
    pass


class BadLocality(InputError):
    pass


class NotInvertible(PslError, ArithmeticError):
    pass


class RingMismatch(PslError, TypeError):
    pass


class NotLocal(PslError):
    pass


class NotAField(PslError):
    pass


# polynomials
class RosterMismatch(PslError, TypeError):
    pass


class SizeMismatch(PslError, ValueError):
    pass


class DivisionByZeroPoly(PslError, ZeroDivisionError):
    pass


class UnknownVariable(InputError, KeyError):
    pass


class NonUnitQ(PslError):
    pass


class RewriteFailed(PslError):
    pass


class ParseError(InputError):
    def __init__(self, message, text="", position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} at position {position} in {text!r}"
        super().__init__(message)


# connections
class NotFlat(PslError):
    pass


class CharZero(InputError):
    pass


class OracleMismatch(PslError, AssertionError):
    pass


class ModeInapplicable(UnsupportedMode):
    pass


class CandidateRejected(PslError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class ShapeMismatch(InputError):
    pass


class WrongOrder(PslError):
    pass


class ZeroEigenvalue(PslError):
    pass


# quantum tori and symplectic lattices
class LatticeMismatch(PslError, TypeError):
    pass


class MissingSqrtQ(PslError):
    pass


class NotSymplectic(InputError):
    pass


class SearchExhausted(PslError):
    pass


# supports
class AmbientMismatch(PslError, TypeError):
    pass


class UnitIdeal(PslError):
    pass


class TagMismatch(PslError):
    pass


# cluster
class FrozenIndex(InputError, IndexError):
    pass


# front end
class SchemaError(InputError):
    pass


class DegreeExceeded(InputError):
    pass
