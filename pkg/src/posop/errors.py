"""Exception types shared across the package."""


class PosopError(Exception):
    """Base class for every error raised by this package."""


class BudgetExceeded(PosopError):
    pass


class UnknownGenerator(PosopError):
    pass


class CutoffTooSmall(PosopError):
    pass


class UnknownName(PosopError):
    pass


class ParseError(PosopError):
    pass


class GridTooSmall(PosopError):
    pass


class MomentDivergence(PosopError):
    pass


class QuadratureBudgetExceeded(PosopError):
    pass


class InvalidBoost(PosopError):
    pass


class SingularMomentum(PosopError):
    pass
