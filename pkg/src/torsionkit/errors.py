"""Exception hierarchy shared by every torsionkit module."""

from __future__ import annotations


class TorsionKitError(Exception):
    """Base class for all library errors (mapped to CLI exit code 3)."""


class DuplicateVertexInSimplex(TorsionKitError, ValueError):
    pass


class VertexIdOutOfRange(TorsionKitError, ValueError):
    pass


class EmptyComplex(TorsionKitError, ValueError):
    pass


class UnsupportedSpace(TorsionKitError, ValueError):
    pass


class ComplexSyntaxError(TorsionKitError, ValueError):
    """Malformed facet file. ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DimensionOutOfRange(TorsionKitError, ValueError):
    pass


class NotPrime(TorsionKitError, ValueError):
    pass


class InvalidThreshold(TorsionKitError, ValueError):
    pass


class NormTooLarge(TorsionKitError, ValueError):
    pass


class NotSymmetric(TorsionKitError, ValueError):
    pass


class ZeroVector(TorsionKitError, ValueError):
    pass


class AmbiguousRounding(TorsionKitError, ArithmeticError):
    """A rescaled overlap landed on a half-integer; the precision budget was violated."""


class NoiseBudgetExceeded(TorsionKitError, ArithmeticError):
    pass


class EvenPrimeUnsupported(TorsionKitError, ValueError):
    pass


class OutsideValidityRegion(TorsionKitError, ValueError):
    pass
