"""Finite-difference oracles used to check the analytic derivatives.

Everything here treats the function under test as a black box, so the
checks stay independent of the closed forms in :mod:`actcheck.core`.

All estimators sample at four step sizes ``8h, 4h, 2h, h`` and combine
them with a three-level Richardson table.  Base steps are rounded to
powers of two so that ``z + k h`` is exact for small ``|z|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .exceptions import NoLimitError, ProbeFailure

ScalarFunction = Callable[[float], float]

EPS = 2.0**-52
LEVELS = 3

# central stencils: (offsets, coefficients); derivative = sum(c f(z + o h)) / h^n
_STENCILS = {
    1: ((1, -1), (0.5, -0.5)),
    2: ((1, 0, -1), (1.0, -2.0, 1.0)),
    3: ((2, 1, -1, -2), (0.5, -1.0, 1.0, -0.5)),
    4: ((2, 1, 0, -1, -2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}

# base steps for the Taylor estimates at 0; truncation is removed by the
# Richardson table, so higher orders can afford larger steps
TAYLOR_STEPS = {1: 2.0**-17, 2: 2.0**-13, 3: 2.0**-8, 4: 2.0**-6}

# accuracy observed for entire functions with O(1) derivatives (exp, tanh,
# arctan); see tests/test_calculus.py
TAYLOR_TOLERANCES = (1e-15, 1e-9, 1e-7, 1e-6, 1e-4)


@dataclass(frozen=True)
class DiffEstimate:
    value: float
    error_estimate: float
    step_used: float


def _pow2(h: float) -> float:
    return 2.0 ** round(math.log2(h))


def _probe(f: ScalarFunction, x: float) -> float:
    y = float(f(x))
    if not math.isfinite(y):
        raise ProbeFailure(f"non-finite sample f({x!r}) = {y!r}")
    return y


def _richardson(estimates: list[float], ratio: float, powers: list[int]) -> list[list[float]]:
    """Extrapolation tableau; ``estimates`` ordered from largest step down."""
    table = [[e] for e in estimates]
    for i in range(1, len(estimates)):
        for j in range(1, i + 1):
            factor = ratio ** powers[j - 1]
            prev = table[i][j - 1]
            table[i].append(prev + (prev - table[i - 1][j - 1]) / (factor - 1.0))
    return table


def _central(f: ScalarFunction, z: float, order: int, h0: float) -> DiffEstimate:
    offsets, coefs = _STENCILS[order]
    steps = [h0 * 2.0**k for k in range(LEVELS, -1, -1)]
    estimates = []
    fmax = 0.0
    cache: dict[float, float] = {}
    for h in steps:
        total = 0.0
        for o, c in zip(offsets, coefs):
            x = z + o * h
            if x not in cache:
                cache[x] = _probe(f, x)
            total += c * cache[x]
            fmax = max(fmax, abs(cache[x]))
        estimates.append(total / h**order)
    table = _richardson(estimates, 2.0, [2, 4, 6])
    best = table[-1][-1]
    truncation = abs(best - table[-1][-2])
    # rounding in the samples and in the arguments z + o h
    slope = abs(estimates[-1]) if order == 1 else fmax / max(abs(z), 1.0)
    weight = sum(abs(c) for c in coefs)
    roundoff = 4.0 * EPS * weight * (fmax + abs(z) * slope) / h0**order
    return DiffEstimate(best, truncation + roundoff, h0)


def central_difference(f: ScalarFunction, z: float, order: int = 1) -> DiffEstimate:
    """Richardson-extrapolated central difference of order 1 or 2.

    Samples ``f`` on ``[z - 8h, z + 8h]`` with ``h = eps^(1/3) (1 + |z|)``
    for order 1 and ``eps^(1/4) (1 + |z|)`` for order 2.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    z = float(z)
    h0 = _pow2(EPS ** (1.0 / (order + 2)) * (1.0 + abs(z)))
    return _central(f, z, order, h0)


def one_sided_difference(f: ScalarFunction, z: float, v: float) -> DiffEstimate:
    """Estimate the right limit of ``(f(z + t v) - f(z)) / t``.

    The quotient is formed at ``t = 8h, 4h, 2h, h`` and extrapolated in powers
    of ``t``.  A convergent quotient with error ``O(t^p)`` has successive gaps
    shrinking by ``2^-p`` per halving.  If the gaps fail to shrink by at
    least 20% at every one of the three shrink levels, and the last gap is
    well above rounding level, the limit is declared nonexistent.  Orders
    ``p < 0.32`` are therefore indistinguishable from divergence.

    Raises
    ------
    NoLimitError
        When the quotient sequence diverges.
    ProbeFailure
        When ``f`` returns a non-finite value on the probe set.
    """
    z, v = float(z), float(v)
    base = _probe(f, z)
    if v == 0.0:
        return DiffEstimate(0.0, 0.0, EPS)
    t0 = _pow2(EPS ** (1.0 / 3.0) * (1.0 + abs(z)) / abs(v))
    steps = [t0 * 2.0**k for k in range(LEVELS, -1, -1)]
    samples = [_probe(f, z + t * v) for t in steps]
    quotients = [(y - base) / t for y, t in zip(samples, steps)]

    fmax = max(abs(base), *(abs(y) for y in samples))
    roundoff = 16.0 * EPS * (fmax + abs(z) * abs(quotients[-1])) / t0
    gaps = [abs(b - a) for a, b in zip(quotients, quotients[1:])]
    stalled = all(g2 > 0.8 * g1 for g1, g2 in zip(gaps, gaps[1:]))
    if stalled and gaps[-1] > 10.0 * (roundoff + 1e-8 * (1.0 + abs(quotients[-1]))):
        raise NoLimitError(f"difference quotient at z={z!r}, v={v!r} diverges: {quotients}")

    table = _richardson(quotients, 2.0, [1, 2, 3])
    best = table[-1][-1]
    return DiffEstimate(best, abs(best - table[-1][-2]) + 4.0 * roundoff, t0)


def taylor_coeffs_at_zero(f: ScalarFunction, max_order: int = 4) -> list[float]:
    """Derivative values ``f(0), f'(0), ..., f^(max_order)(0)``.

    Orders above 2 use the wider five-point stencils.  Expected absolute
    accuracy per order is listed in :data:`TAYLOR_TOLERANCES`.
    """
    if not 0 <= max_order <= 4:
        raise ValueError("max_order must lie in 0..4")
    coeffs = [_probe(f, 0.0)]
    for n in range(1, max_order + 1):
        coeffs.append(_central(f, 0.0, n, TAYLOR_STEPS[n]).value)
    return coeffs
