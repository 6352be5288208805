"""Exception types raised across the package."""


class PseudoReachError(Exception):
    """Base class for all package errors."""


class Unsupported(PseudoReachError):
    """The instance lies outside the supported class; the CLI exits with code 2."""


class DivisionByZero(PseudoReachError, ZeroDivisionError):
    pass


class NegativeInput(PseudoReachError, ValueError):
    pass


class NotOnUnitCircle(PseudoReachError, ValueError):
    pass


class ZeroPolynomial(PseudoReachError, ValueError):
    pass


class NonPositiveBase(PseudoReachError, ValueError):
    pass


class PointNotInClosure(PseudoReachError, ValueError):
    pass


class NotDiagonalisable(Unsupported):
    pass


class UnsupportedTorusCoupling(Unsupported):
    pass


class UnsupportedTargetShape(Unsupported):
    pass


class RootsNotEqualModulus(PseudoReachError, ValueError):
    pass


class NonDiagonalisableLRS(PseudoReachError, ValueError):
    pass


class ParseError(PseudoReachError, ValueError):
    pass


class DimensionMismatch(PseudoReachError, ValueError):
    pass


class UnknownAtomKind(ParseError):
    pass
