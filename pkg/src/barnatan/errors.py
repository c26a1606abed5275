"""Exception types shared across the package."""


class BarNatanError(Exception):
    """Base class for all engine errors."""


class ParseError(BarNatanError):
    pass


class ValidationError(BarNatanError):
    pass


class DimensionMismatch(BarNatanError):
    pass


class NonHomogeneousSum(BarNatanError):
    """Two monomials with different exponents landed in one matrix cell."""


class IndexOutOfRange(BarNatanError):
    pass


class NotAnEdge(BarNatanError):
    pass


class InvalidBasepoint(BarNatanError):
    pass


class TooLarge(BarNatanError):
    """Full-cube construction refused; use the scan reduction instead."""


class NotAComplex(BarNatanError):
    pass


class NotAKnotProfile(BarNatanError):
    pass


class UnexpectedGap(BarNatanError):
    """Free part of a knot profile is not two summands 2 apart in grq."""


class NotPositiveCrossing(BarNatanError):
    pass


class NotASaddlePair(BarNatanError):
    pass


class ChainMapLawViolated(BarNatanError):
    pass


class IdentityCheckFailed(BarNatanError):
    pass


class VerificationFailed(BarNatanError):
    pass


class RepresentativeNotCycle(BarNatanError):
    pass


class MissingUnknotComponent(BarNatanError):
    pass


class UnknownProperty(BarNatanError):
    pass
