"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """An input parameter lies outside its physical or documented domain."""


class UnphysicalStateError(ValueError):
    """A state violates symmetry, positivity or the uncertainty principle
    beyond the floating-point guard band."""


class TruncationError(RuntimeError):
    """A truncated number-basis computation lost more probability than the
    configured tolerance allows."""
