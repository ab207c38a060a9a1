"""Closed-form activation functions, their derivatives and output ranges.

Every kernel accepts a float or a numpy array and returns the same shape.
The scalar query functions (`first_derivative`, `second_derivative`,
`directional_derivative`) report non-differentiable points explicitly
through `DerivativeValue` instead of silently picking a number.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import ActivationError, DimensionMismatch, NoLimitError

SELU_A0 = 1.05070098
SELU_B0 = 1.7580993261

KINDS = (
    "binary",
    "logistic",
    "arctan",
    "tanh",
    "softsign",
    "linear",
    "relu",
    "leakyrelu",
    "softplus",
    "elu",
    "selu",
    "swish",
)

# parametric kinds and their default parameter
PARAM_DEFAULTS = {"leakyrelu": 0.01, "elu": 1.0, "swish": 1.0}


@dataclass(frozen=True)
class Activation:
    """One activation function together with its parameter.

    Parameters
    ----------
    kind : str
        One of :data:`KINDS`.
    param : float, optional
        Non-negative shape parameter for ``leakyrelu``, ``elu`` and ``swish``.
        Defaults to :data:`PARAM_DEFAULTS` for those kinds and must be
        omitted for all others.
    kink_convention : float
        Number in ``[0, 1]`` used by :func:`conventional_first_derivative`
        at a kink: 0 picks the left one-sided derivative, 1 the right one.
    """

    kind: str
    param: Optional[float] = None
    kink_convention: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ActivationError(f"unknown activation {self.kind!r}")
        if self.kind in PARAM_DEFAULTS:
            param = PARAM_DEFAULTS[self.kind] if self.param is None else float(self.param)
            if not math.isfinite(param) or param < 0:
                raise ActivationError(f"{self.kind} parameter must be finite and >= 0, got {param}")
            object.__setattr__(self, "param", param)
        elif self.param is not None:
            raise ActivationError(f"{self.kind} takes no parameter")
        lam = float(self.kink_convention)
        if not 0.0 <= lam <= 1.0:
            raise ActivationError(f"kink_convention must lie in [0, 1], got {lam}")
        object.__setattr__(self, "kink_convention", lam)

    @property
    def a(self) -> float:
        return 0.0 if self.param is None else self.param

    def __call__(self, z):
        return evaluate(self, z)

    def __str__(self):
        if self.param is None:
            return self.kind
        return f"{self.kind}(a={self.param:g})"


STANDARD_SET = tuple(Activation(kind) for kind in KINDS)


class UndefinedReason(str, enum.Enum):
    KINK = "kink"
    SECOND_DERIVATIVE_AT_KINK = "second-derivative-at-kink"


@dataclass(frozen=True)
class DerivativeValue:
    """Either a finite derivative value or a marker that none exists."""

    value: Optional[float] = None
    reason: Optional[UndefinedReason] = None

    @classmethod
    def defined(cls, value: float) -> "DerivativeValue":
        return cls(value=float(value))

    @classmethod
    def undefined(cls, reason: UndefinedReason) -> "DerivativeValue":
        return cls(reason=UndefinedReason(reason))

    @property
    def is_defined(self) -> bool:
        return self.reason is None

    def __float__(self):
        if not self.is_defined:
            raise ValueError(f"derivative undefined ({self.reason.value})")
        return self.value


@dataclass(frozen=True)
class Interval:
    """Interval on the extended real line with per-endpoint openness."""

    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval requires lo <= hi")
        if (math.isinf(self.lo) and self.lo_closed) or (math.isinf(self.hi) and self.hi_closed):
            raise ValueError("infinite endpoints must be open")

    def contains(self, x, slack: float = 0.0):
        """Membership test; open endpoints may be touched within ``slack``.

        Works elementwise on arrays.
        """
        x = np.asarray(x, dtype=float)
        lower = x >= self.lo - slack if self.lo_closed else x > self.lo - slack
        upper = x <= self.hi + slack if self.hi_closed else x < self.hi + slack
        ok = lower & upper
        return bool(ok) if ok.ndim == 0 else ok

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo!r}, {self.hi!r}{right}"


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _asfloat(z):
    return np.asarray(z, dtype=float)


def logistic(z):
    """Overflow-free logistic function."""
    z = _asfloat(z)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def softplus(z):
    z = _asfloat(z)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _sech2(z):
    # 4 e^{-2|z|} / (1 + e^{-2|z|})^2, finite for every float input;
    # |z| is capped so 2|z| cannot overflow (exp already underflows at 400)
    e = np.exp(-2.0 * np.minimum(np.abs(_asfloat(z)), 400.0))
    return 4.0 * e / (1.0 + e) ** 2


def _neg_expm1(z):
    return np.expm1(np.minimum(z, 0.0))


def _swish(z, a):
    z = _asfloat(z)
    return z * logistic(a * z)


def _swish_d1(z, a):
    # a f + s (1 - a f) rearranged as s (1 + a z (1 - s)); 1 - s taken as
    # logistic(-a z) so large |z| loses nothing to cancellation
    z = _asfloat(z)
    s, s_neg = logistic(a * z), logistic(-a * z)
    return s * (1.0 + z * (a * s_neg))


def _swish_d2(z, a):
    # a (a f + 2 s (1 - a f)) (1 - s) == a s (2 (1 - s) + a z (1 - s) (1 - 2 s))
    z = _asfloat(z)
    s, s_neg = logistic(a * z), logistic(-a * z)
    return a * s * (2.0 * s_neg + (z * (a * s_neg)) * (s_neg - s))


def _logistic_d1(z, a=None):
    return logistic(z) * logistic(-_asfloat(z))


def _logistic_d2(z, a=None):
    s, s_neg = logistic(z), logistic(-_asfloat(z))
    return s * s_neg * (s_neg - s)


def _zeros(z, a=None):
    return np.zeros_like(_asfloat(z))


def _ones(z, a=None):
    return np.ones_like(_asfloat(z))


Kernel = Callable[..., np.ndarray]

# (f, f', f'') per kind; every kernel has signature (z, a).  Values returned
# at non-differentiable points are overridden by the public functions.
KERNELS: dict[str, tuple[Kernel, Kernel, Kernel]] = {
    "binary": (
        lambda z, a: np.where(_asfloat(z) >= 0, 1.0, 0.0),
        _zeros,
        _zeros,
    ),
    "logistic": (
        lambda z, a: logistic(z),
        _logistic_d1,
        _logistic_d2,
    ),
    "arctan": (
        lambda z, a: np.arctan(_asfloat(z)),
        lambda z, a: 1.0 / (1.0 + _asfloat(z) ** 2),
        lambda z, a: -2.0 * _asfloat(z) / (1.0 + _asfloat(z) ** 2) ** 2,
    ),
    "tanh": (
        lambda z, a: np.tanh(_asfloat(z)),
        lambda z, a: _sech2(z),
        lambda z, a: -2.0 * np.tanh(_asfloat(z)) * _sech2(z),
    ),
    "softsign": (
        lambda z, a: _asfloat(z) / (1.0 + np.abs(_asfloat(z))),
        lambda z, a: 1.0 / (1.0 + np.abs(_asfloat(z))) ** 2,
        lambda z, a: -2.0 * np.sign(_asfloat(z)) / (1.0 + np.abs(_asfloat(z))) ** 3,
    ),
    "linear": (lambda z, a: _asfloat(z) + 0.0, _ones, _zeros),
    "relu": (
        lambda z, a: np.maximum(_asfloat(z), 0.0),
        lambda z, a: np.where(_asfloat(z) > 0, 1.0, 0.0),
        _zeros,
    ),
    "leakyrelu": (
        lambda z, a: np.where(_asfloat(z) >= 0, _asfloat(z), a * _asfloat(z)),
        lambda z, a: np.where(_asfloat(z) > 0, 1.0, a),
        _zeros,
    ),
    "softplus": (
        lambda z, a: softplus(z),
        lambda z, a: logistic(z),
        _logistic_d1,
    ),
    "elu": (
        lambda z, a: np.where(_asfloat(z) >= 0, _asfloat(z), a * _neg_expm1(z)),
        lambda z, a: np.where(_asfloat(z) > 0, 1.0, a * np.exp(np.minimum(z, 0.0))),
        lambda z, a: np.where(_asfloat(z) > 0, 0.0, a * np.exp(np.minimum(z, 0.0))),
    ),
    "selu": (
        lambda z, a: np.where(_asfloat(z) >= 0, SELU_A0 * _asfloat(z), SELU_B0 * _neg_expm1(z)),
        lambda z, a: np.where(_asfloat(z) > 0, SELU_A0, SELU_B0 * np.exp(np.minimum(z, 0.0))),
        lambda z, a: np.where(_asfloat(z) > 0, 0.0, SELU_B0 * np.exp(np.minimum(z, 0.0))),
    ),
    "swish": (_swish, _swish_d1, _swish_d2),
}


def _one_sided_at_zero(desc: Activation) -> Optional[tuple[Optional[float], float]]:
    """(left, right) derivatives at 0 for kinds with a kink there, else None.

    ``left`` is None when the left difference quotient diverges (binary).
    """
    kind, a = desc.kind, desc.a
    if kind == "binary":
        return None, 0.0
    if kind == "relu":
        return 0.0, 1.0
    if kind == "leakyrelu" and a != 1.0:
        return a, 1.0
    if kind == "elu" and a != 1.0:
        return a, 1.0
    if kind == "selu":
        return SELU_B0, SELU_A0
    return None


def _undefined_at_zero(desc: Activation, order: int) -> Optional[UndefinedReason]:
    if _one_sided_at_zero(desc) is not None:
        return UndefinedReason.KINK
    if order == 2 and (desc.kind == "softsign" or desc.kind == "elu"):
        return UndefinedReason.SECOND_DERIVATIVE_AT_KINK
    return None


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------


def evaluate(desc: Activation, z):
    """Evaluate ``desc`` at ``z`` (float or array)."""
    return _scalar(KERNELS[desc.kind][0](z, desc.a))


def _derivative(desc: Activation, z: float, order: int) -> DerivativeValue:
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    if z == 0.0:
        reason = _undefined_at_zero(desc, order)
        if reason is not None:
            return DerivativeValue.undefined(reason)
    return DerivativeValue.defined(KERNELS[desc.kind][order](z, desc.a))


def first_derivative(desc: Activation, z: float) -> DerivativeValue:
    return _derivative(desc, z, 1)


def second_derivative(desc: Activation, z: float) -> DerivativeValue:
    return _derivative(desc, z, 2)


def conventional_first_derivative(desc: Activation, z: float) -> float:
    """First derivative with kinks resolved by ``desc.kink_convention``.

    At a kink the value is ``left + lam * (right - left)`` where ``left`` and
    ``right`` are the one-sided derivatives; relu with the default ``lam=0``
    gives 0.  The binary step has no finite left derivative and reports 0.
    """
    d = first_derivative(desc, z)
    if d.is_defined:
        return d.value
    left, right = _one_sided_at_zero(desc)
    if left is None:
        return 0.0
    return left + desc.kink_convention * (right - left)


def derivative_array(desc: Activation, z, order: int = 1):
    """Vectorised derivative of the given order.

    Returns ``(values, defined)``; undefined entries hold NaN.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    z = _asfloat(z)
    values = np.array(KERNELS[desc.kind][order](z, desc.a), dtype=float, copy=True)
    defined = np.ones(z.shape, dtype=bool)
    if order > 0 and _undefined_at_zero(desc, order) is not None:
        defined = z != 0.0
        values = np.where(defined, values, np.nan)
    return values, defined


def directional_derivative(desc: Activation, z: float, v: float) -> float:
    """Right limit of ``(f(z + t v) - f(z)) / t`` as ``t -> 0+``.

    Raises
    ------
    NoLimitError
        For the binary step at 0 with ``v < 0``, where the quotient diverges.
    """
    z, v = float(z), float(v)
    if not (math.isfinite(z) and math.isfinite(v)):
        raise ValueError("z and v must be finite")
    d = first_derivative(desc, z)
    if d.is_defined:
        return v * d.value
    left, right = _one_sided_at_zero(desc)
    if v >= 0:
        return v * right
    if left is None:
        raise NoLimitError(f"{desc} has no left derivative at 0")
    return v * left


def output_range(desc: Activation) -> Interval:
    """Exact image of the activation over the real line."""
    kind, a = desc.kind, desc.a
    inf = math.inf
    if kind == "binary":
        return Interval(0.0, 1.0, True, True)
    if kind == "logistic":
        return Interval(0.0, 1.0)
    if kind == "arctan":
        return Interval(-math.pi / 2, math.pi / 2)
    if kind in ("tanh", "softsign"):
        return Interval(-1.0, 1.0)
    if kind == "linear":
        return Interval(-inf, inf)
    if kind == "relu":
        return Interval(0.0, inf, lo_closed=True)
    if kind == "leakyrelu":
        return Interval(-inf, inf) if a > 0 else Interval(0.0, inf, lo_closed=True)
    if kind == "softplus":
        return Interval(0.0, inf)
    if kind == "elu":
        # a = 0 is relu, which attains 0
        return Interval(-a, inf) if a > 0 else Interval(0.0, inf, lo_closed=True)
    if kind == "selu":
        return Interval(-SELU_B0, inf)
    if kind == "swish":
        if a == 0:
            return Interval(-inf, inf)
        from .constants import swish_minimum

        return Interval(swish_minimum(a)[1], inf, lo_closed=True)
    raise ActivationError(kind)  # pragma: no cover


@dataclass(frozen=True)
class MaxoutParams:
    """k affine pieces ``biases[j] + weights[j] @ x``."""

    biases: np.ndarray
    weights: np.ndarray
    k: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        biases = np.atleast_1d(np.asarray(self.biases, dtype=float))
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim == 1:
            weights = weights[:, None]
        if biases.ndim != 1 or weights.ndim != 2:
            raise DimensionMismatch("biases must be a vector and weights a k x d matrix")
        if biases.size == 0 or weights.shape[0] != biases.size or weights.shape[1] < 1:
            raise DimensionMismatch(
                f"need k >= 1 pieces with matching rows, got {biases.size} biases "
                f"and weights of shape {weights.shape}"
            )
        object.__setattr__(self, "biases", biases)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "k", biases.size)
        object.__setattr__(self, "d", weights.shape[1])


def maxout_evaluate(params: MaxoutParams, x) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (params.d,):
        raise DimensionMismatch(f"expected input of dimension {params.d}, got shape {x.shape}")
    return float(np.max(params.biases + params.weights @ x))
