"""Exception types shared across the package."""


class VarMomentsError(ValueError):
    """Base class for all errors raised by varmoments."""


class DomainError(VarMomentsError):
    """An argument lies outside the domain where a quantity is defined
    (sample too short, correlation outside (-1, 1), ...)."""


class InputError(VarMomentsError):
    """Malformed input data: non-finite entries, asymmetric matrices,
    unparseable files."""


class RangeError(VarMomentsError):
    """A numerical safeguard tripped during evaluation."""
