"""Exception types raised across the package."""


class CubeError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(CubeError, ValueError):
    pass


class CapExceeded(CubeError, ValueError):
    """Cube dimension beyond the supported enumeration size."""


class NegativeTime(CubeError, ValueError):
    pass


class DegenerateTime(CubeError, ValueError):
    """t = 0, where the standardized bias weight is undefined."""


class NotMeanZero(CubeError, ValueError):
    pass


class InvalidExponent(CubeError, ValueError):
    pass


class TooManyVectors(CubeError, ValueError):
    pass


class QuadratureUnderresolved(CubeError, ArithmeticError):
    pass


class DegenerateRatio(CubeError, ArithmeticError):
    """Both sides of a ratio vanish (or the denominator does)."""


class AllRestartsDegenerate(CubeError, ArithmeticError):
    pass


class UnsupportedKind(CubeError, ValueError):
    pass
