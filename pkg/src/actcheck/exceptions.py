"""Exception types raised across the package."""


class ActivationError(ValueError):
    """Invalid activation descriptor or parameter."""


class DimensionMismatch(ValueError):
    """Input vector does not match the parameter dimension."""


class ProbeFailure(ArithmeticError):
    """A finite-difference probe sampled a non-finite value."""


class NoLimitError(ArithmeticError):
    """A one-sided difference quotient does not converge."""


class BracketError(ValueError):
    """Root bracket endpoints do not have opposite residual signs."""


class ParameterDomainError(ValueError):
    """A parameter lies outside the domain where a result is defined."""


class InvalidVarianceError(ValueError):
    """Gaussian variance must be strictly positive."""


class NotCollapsibleError(ValueError):
    """A two-layer network with non-linear activations cannot be collapsed."""
