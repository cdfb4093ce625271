"""Exception hierarchy shared by every module of the package."""


class MuckenhouptError(Exception):
    """Base class for library errors."""


class GridMismatch(MuckenhouptError, ValueError):
    """Two sampled objects live on different grids."""


class DynamicRangeError(MuckenhouptError, ArithmeticError):
    """A weight power left the representable floating-point range."""


class NonNegativityViolation(MuckenhouptError, ValueError):
    """A function that must be nonnegative (and not identically zero) is not."""


class CertificateFailure(MuckenhouptError):
    """The a-posteriori check of a majorant construction failed after all retries."""


class DomainEscape(MuckenhouptError):
    """A bound function was evaluated outside the flatness radius it is asserted on."""


class EmptyNeighborhood(MuckenhouptError):
    """No exponent besides p0 keeps the extrapolated weight inside the flatness radius."""
