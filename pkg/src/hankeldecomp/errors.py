"""Exception hierarchy shared by every module of the package."""


class DecompError(Exception):
    """Base class for all package errors."""


class NotHomogeneous(DecompError):
    pass


class DegreeExceeded(DecompError):
    pass


class DimensionMismatch(DecompError):
    pass


class NotInvertible(DecompError):
    pass


class ZeroPolynomial(DecompError):
    pass


class UnassignedSlot(DecompError):
    pass


class SingularBlock(DecompError):
    pass


class DegenerateNormalization(DecompError):
    """A common eigenvector has (numerically) zero coordinate on the monomial 1.

    This only happens in non-generic coordinates; callers re-randomize.
    """


class MultiplicityMismatch(DecompError):
    pass


class KExponentExhausted(DecompError):
    pass


class UnknownVariable(DecompError):
    pass


class PolynomialSyntaxError(DecompError, SyntaxError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position
