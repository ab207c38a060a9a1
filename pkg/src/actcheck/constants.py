"""Numeric constants and extrema of the activation functions.

Transcendental constants are solved with a bracketed bisection/Newton
hybrid; one-dimensional extrema are located by golden-section search and,
where a closed form for the stationarity condition exists, polished by
root-finding on it so that every reported residual is near machine
precision.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import core
from .core import Activation, Interval
from .exceptions import BracketError, ParameterDomainError

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RootSolveConfig:
    bracket: tuple[float, float]
    abs_tol: float = 1e-13
    max_iter: int = 200

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")
        if not self.bracket[0] < self.bracket[1]:
            raise ValueError("bracket must satisfy lo < hi")


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class ConstantRecord:
    name: str
    value: float
    quoted_value: Optional[float]
    residual: float
    tolerance: float = 5e-4
    description: str = ""

    @property
    def deviation(self) -> Optional[float]:
        if self.quoted_value is None:
            return None
        return abs(self.value - self.quoted_value)

    @property
    def mismatch(self) -> bool:
        """True when the computed value is further than ``tolerance`` from the quoted one."""
        return self.deviation is not None and self.deviation > self.tolerance


def bisect_newton(
    g: Callable[[float], float],
    config: RootSolveConfig,
    dg: Optional[Callable[[float], float]] = None,
    newton_width: float = 1e-8,
) -> RootResult:
    """Root of ``g`` inside ``config.bracket``.

    Bisects until the bracket is narrower than ``newton_width``, then takes
    Newton steps with ``dg``.  Steps that leave the bracket fall back to
    bisection, so convergence is guaranteed.  Without ``dg`` the search
    bisects down to adjacent floats.

    Raises
    ------
    BracketError
        If ``g`` has the same sign at both bracket ends.
    ArithmeticError
        If the residual is still above ``abs_tol`` after ``max_iter`` steps.
    """
    lo, hi = map(float, config.bracket)
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return RootResult(lo, 0.0, 0)
    if ghi == 0.0:
        return RootResult(hi, 0.0, 0)
    if (glo > 0) == (ghi > 0):
        raise BracketError(f"g({lo})={glo} and g({hi})={ghi} do not bracket a root")

    x = 0.5 * (lo + hi)
    gx = g(x)
    for it in range(1, config.max_iter + 1):
        if gx == 0.0:
            break
        if (gx > 0) == (glo > 0):
            lo, glo = x, gx
        else:
            hi = x
        width = hi - lo
        if width <= 4.0 * np.spacing(max(abs(lo), abs(hi))):
            break
        candidate = None
        if dg is not None and width <= newton_width:
            slope = dg(x)
            if slope != 0.0:
                candidate = x - gx / slope
                if not lo < candidate < hi:
                    candidate = None
        if candidate is None:
            candidate = 0.5 * (lo + hi)
        if candidate == x:
            break
        x = candidate
        gx = g(x)
        if dg is not None and abs(gx) <= 0.25 * config.abs_tol and hi - lo <= newton_width:
            break
    residual = abs(gx)
    if residual > config.abs_tol:
        raise ArithmeticError(f"root solve stalled at x={x!r} with residual {residual!r}")
    return RootResult(x, residual, it)


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10, max_iter: int = 500):
    """Minimise a unimodal ``f`` on ``[lo, hi]``; returns ``(argmin, min)``."""
    a, b = float(lo), float(hi)
    x1 = b - INV_GOLDEN * (b - a)
    x2 = a + INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_GOLDEN * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


# ---------------------------------------------------------------------------
# defining equations
# ---------------------------------------------------------------------------

SWISH1 = Activation("swish", 1.0)
LOGISTIC = Activation("logistic")
TANH = Activation("tanh")


def swish_min_equation(z: float) -> float:
    """Stationarity condition of swish with a=1: 1 + (1 + z) e^{-z}."""
    return 1.0 + (1.0 + z) * math.exp(-z)


def swish_d1_extremum_equation(z: float) -> float:
    """Stationarity condition of swish' with a=1: 2 - z + (2 + z) e^{-z}."""
    return 2.0 - z + (2.0 + z) * math.exp(-z)


def swish1_third_derivative(z: float) -> float:
    s = float(core.logistic(z))
    ds = s * float(core.logistic(-z))
    u = 1.0 - 2.0 * s
    return ds * (u * (3.0 + z * u) - 2.0 * z * ds)


@functools.lru_cache(maxsize=None)
def _swish_min_root() -> RootResult:
    return bisect_newton(
        swish_min_equation,
        RootSolveConfig(bracket=(-2.0, -1.0)),
        dg=lambda z: -z * math.exp(-z),
    )


@functools.lru_cache(maxsize=None)
def _swish_d1_root() -> RootResult:
    return bisect_newton(
        swish_d1_extremum_equation,
        RootSolveConfig(bracket=(1.0, 4.0)),
        dg=lambda z: -1.0 - (1.0 + z) * math.exp(-z),
    )


def solve_swish_min_arg() -> float:
    """Unique root z1 of ``1 + (1 + z) e^{-z} = 0``; the argmin of swish with a=1."""
    return _swish_min_root().root


def swish_minimum(a: float) -> tuple[float, float]:
    """``(argmin, min)`` of swish with parameter ``a > 0``: ``(z1/a, (1+z1)/a)``."""
    if not a > 0:
        raise ParameterDomainError("swish has a finite minimum only for a > 0")
    z1 = solve_swish_min_arg()
    return z1 / a, (1.0 + z1) / a


def solve_swish_d1_extremum_arg() -> float:
    """Positive root of ``2 - z + (2 + z) e^{-z} = 0``, where swish' (a=1) peaks."""
    return _swish_d1_root().root


def logistic_d2_extrema() -> tuple[float, float]:
    arg = math.log(2.0 + math.sqrt(3.0))
    return arg, abs(core.second_derivative(LOGISTIC, arg).value)


def tanh_d2_bound() -> float:
    return 4.0 / math.sqrt(27.0)


def tanh_d2_grid_max(lo: float = -5.0, hi: float = 5.0, step: float = 1e-3) -> tuple[float, float]:
    """Independent check of the tanh'' bound: grid scan, then golden refinement.

    Returns ``(argmax, max)`` of ``|tanh''|``.  The two maximisers are
    symmetric; the grid scan picks the one it meets first.
    """
    z = lo + step * np.arange(int(round((hi - lo) / step)) + 1)
    vals, _ = core.derivative_array(TANH, z, 2)
    i = int(np.argmax(np.abs(vals)))
    x, neg = golden_section(
        lambda t: -abs(core.second_derivative(TANH, t).value), z[max(i - 1, 0)], z[min(i + 1, z.size - 1)], tol=1e-12
    )
    return x, -neg


@functools.lru_cache(maxsize=None)
def _swish1_d2_min() -> tuple[float, float, float]:
    """(argmin, min, residual) of swish'' with a=1 on [2, 8]."""

    def d2(z):
        return core.second_derivative(SWISH1, z).value

    x, _ = golden_section(d2, 2.0, 8.0, tol=1e-10)
    # golden section cannot resolve the argmin past ~sqrt(eps); finish on f''' = 0
    root = bisect_newton(swish1_third_derivative, RootSolveConfig(bracket=(x - 1e-4, x + 1e-4)))
    return root.root, d2(root.root), root.residual


def swish_d1_bounds(a: float) -> Interval:
    """Image of swish' for parameter ``a``: ``[1 - c', c']``, or ``{1/2}`` at a=0."""
    if a < 0:
        raise ParameterDomainError("a must be >= 0")
    if a == 0:
        return Interval(0.5, 0.5, True, True)
    c_prime = core.first_derivative(SWISH1, solve_swish_d1_extremum_arg()).value
    return Interval(1.0 - c_prime, c_prime, True, True)


def swish_d2_bounds(a: float) -> Interval:
    """Image of swish'' for parameter ``a``; scales linearly in ``a``."""
    if a < 0:
        raise ParameterDomainError("a must be >= 0")
    if a == 0:
        return Interval(0.0, 0.0, True, True)
    return Interval(a * _swish1_d2_min()[1], 0.5 * a, True, True)


@functools.lru_cache(maxsize=None)
def _table() -> tuple[ConstantRecord, ...]:
    z1 = _swish_min_root()
    zp = _swish_d1_root()
    c_prime = core.first_derivative(SWISH1, zp.root).value
    log_arg, log_bound = logistic_d2_extrema()
    tanh_arg = math.atanh(1.0 / math.sqrt(3.0))
    d2_arg, d2_min, d2_res = _swish1_d2_min()
    swish_min_value = float(core.evaluate(SWISH1, z1.root))
    return (
        ConstantRecord("z1", z1.root, -1.278, z1.residual, 5e-4, "argmin of swish (a=1)"),
        ConstantRecord(
            "swish1_min",
            swish_min_value,
            -0.278,
            abs(swish_min_value - (1.0 + z1.root)),
            5e-4,
            "min of swish (a=1), equals 1 + z1",
        ),
        ConstantRecord("z1_prime", zp.root, 2.218, zp.residual, 5e-4, "argmax of swish' (a=1)"),
        ConstantRecord("c_prime", c_prime, 1.098, zp.residual, 5e-4, "max of swish' (a=1)"),
        ConstantRecord(
            "swish_d1_lower",
            1.0 - c_prime,
            -0.098,
            abs(core.first_derivative(SWISH1, -zp.root).value - (1.0 - c_prime)),
            5e-4,
            "min of swish' (a=1), attained at -z1_prime",
        ),
        ConstantRecord(
            "logistic_d2_arg",
            log_arg,
            math.log(2.0 + math.sqrt(3.0)),
            abs(_logistic_d3(log_arg)),
            1e-15,
            "argmin of logistic''",
        ),
        ConstantRecord("logistic_d2_bound", log_bound, 0.0962, abs(_logistic_d3(log_arg)), 5e-5, "max of |logistic''|"),
        ConstantRecord("tanh_d2_arg", tanh_arg, None, abs(_tanh_d3(tanh_arg)), 0.0, "argmin of tanh''"),
        ConstantRecord("tanh_d2_bound", tanh_d2_bound(), 0.770, abs(_tanh_d3(tanh_arg)), 5e-4, "max of |tanh''|, 4/sqrt(27)"),
        ConstantRecord("swish_d2_lower_arg", d2_arg, None, d2_res, 0.0, "argmin of swish'' (a=1)"),
        ConstantRecord("swish_d2_lower", d2_min, -0.0369, d2_res, 5e-4, "min of swish'' (a=1)"),
        ConstantRecord("swish_d2_upper", 0.5, 0.5, abs(swish1_third_derivative(0.0)), 1e-15, "max of swish'' (a=1), at 0"),
        ConstantRecord("selu_a0", core.SELU_A0, 1.05070098, 0.0, 0.0, "selu slope for z >= 0"),
        ConstantRecord("selu_b0", core.SELU_B0, 1.7580993261, 0.0, 0.0, "selu scale for z < 0"),
    )


def _logistic_d3(z: float) -> float:
    s = float(core.logistic(z))
    ds = s * float(core.logistic(-z))
    return ds * (1.0 - 6.0 * s + 6.0 * s * s)


def _tanh_d3(z: float) -> float:
    t = math.tanh(z)
    return -2.0 * (1.0 - t * t) * (1.0 - 3.0 * t * t)


def constant_table() -> list[ConstantRecord]:
    """Every reproduced constant with its residual and the quoted value."""
    return list(_table())


def lookup(name: str) -> ConstantRecord:
    for rec in _table():
        if rec.name == name:
            return rec
    raise KeyError(name)
