"""Activation functions with exact derivatives and numerical cross-checks."""

from .core import (
    KINDS,
    SELU_A0,
    SELU_B0,
    STANDARD_SET,
    Activation,
    DerivativeValue,
    Interval,
    MaxoutParams,
    UndefinedReason,
    conventional_first_derivative,
    derivative_array,
    directional_derivative,
    evaluate,
    first_derivative,
    maxout_evaluate,
    output_range,
    second_derivative,
)
from .exceptions import (
    ActivationError,
    BracketError,
    DimensionMismatch,
    InvalidVarianceError,
    NoLimitError,
    NotCollapsibleError,
    ParameterDomainError,
    ProbeFailure,
)

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "SELU_A0",
    "SELU_B0",
    "STANDARD_SET",
    "Activation",
    "ActivationError",
    "BracketError",
    "DerivativeValue",
    "DimensionMismatch",
    "Interval",
    "InvalidVarianceError",
    "MaxoutParams",
    "NoLimitError",
    "NotCollapsibleError",
    "ParameterDomainError",
    "ProbeFailure",
    "UndefinedReason",
    "conventional_first_derivative",
    "derivative_array",
    "directional_derivative",
    "evaluate",
    "first_derivative",
    "maxout_evaluate",
    "output_range",
    "second_derivative",
]
