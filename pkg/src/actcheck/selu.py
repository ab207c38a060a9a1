"""Mean and second moment of a Gaussian pushed through selu.

The map sends ``(mu, nu)`` to ``(E[selu(r)], E[selu(r)^2])`` for
``r ~ N(mu, nu)``; ``(0, 1)`` is its fixed point.

Selu is continuous at 0 but its slope jumps from ``b0`` to ``a0`` there, so a
plain Gauss-Hermite rule over the whole line converges only algebraically.
The default integrator therefore splits the Gaussian at the kink and applies
Gauss-Legendre on each smooth half (truncated at ``SUPPORT_WIDTH`` standard
deviations).  The unsplit Gauss-Hermite sum stays available through
:func:`hermite_rule`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import log_ndtr, ndtr

from .core import SELU_A0, SELU_B0, Activation, evaluate
from .exceptions import InvalidVarianceError

SELU = Activation("selu")
DEFAULT_ORDER = 60
MIN_ORDER = 20
# 8 sd keeps the neglected tail below ~1e-13 while letting the minimum
# order (20) resolve each half of the split integral to ~1e-10
SUPPORT_WIDTH = 8.0
FIXED_POINT = (0.0, 1.0)


@dataclass(frozen=True)
class MomentPair:
    mu: float
    nu: float

    def __post_init__(self):
        mu, nu = float(self.mu), float(self.nu)
        if not (math.isfinite(mu) and math.isfinite(nu)):
            raise InvalidVarianceError("mean and variance must be finite")
        if nu <= 0:
            raise InvalidVarianceError(f"variance must be > 0, got {nu}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)

    def distance_to_fixed_point(self) -> float:
        return math.hypot(self.mu - FIXED_POINT[0], self.nu - FIXED_POINT[1])


class Moments(NamedTuple):
    m1: float
    m2: float


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights of an ``order``-point Gauss rule.

    ``family`` is ``"hermite"`` (weight ``exp(-x^2)`` on the real line,
    weights summing to sqrt(pi)) or ``"legendre"`` (unit weight on
    ``[-1, 1]``, weights summing to 2).
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    family: str

    def __post_init__(self):
        for name in ("nodes", "weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.nodes.shape != (self.order,) or self.weights.shape != (self.order,):
            raise ValueError("nodes and weights must both have length order")
        # tail weights of high-order Hermite rules may underflow to 0
        if np.any(self.weights < 0) or not np.any(self.weights > 0):
            raise ValueError("weights must be non-negative")
        if self.family not in ("hermite", "legendre"):
            raise ValueError(f"unknown quadrature family {self.family!r}")


def golub_welsch(off_diagonal: np.ndarray, total_mass: float):
    """Nodes and weights for an even weight function with the given Jacobi matrix.

    Nodes are the eigenvalues of the symmetric tridiagonal matrix with zero
    diagonal.  Weights are Christoffel numbers ``mass / sum_k p_k(x)^2`` from
    the orthonormal three-term recurrence, which keeps the tiny tail weights
    accurate where squared eigenvector entries would underflow.
    """
    n = off_diagonal.size + 1
    nodes = eigh_tridiagonal(np.zeros(n), off_diagonal, eigvals_only=True)
    nodes = 0.5 * (nodes - nodes[::-1])
    prev, cur = np.zeros(n), np.ones(n)
    total = np.ones(n)
    log_scale = np.zeros(n)
    for k in range(1, n):
        b_prev = off_diagonal[k - 2] if k >= 2 else 0.0
        prev, cur = cur, (nodes * cur - b_prev * prev) / off_diagonal[k - 1]
        total += cur * cur
        # rescale per node before the recurrence overflows
        big = np.abs(cur) > 1e100
        if big.any():
            factor = np.where(big, 1e-100, 1.0)
            prev, cur, total = prev * factor, cur * factor, total * factor**2
            log_scale += np.where(big, 200.0 * np.log(10.0), 0.0)
    weights = total_mass * np.exp(-np.log(total) - log_scale)
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


@functools.lru_cache(maxsize=32)
def hermite_rule(order: int = DEFAULT_ORDER) -> QuadratureRule:
    k = np.arange(1, order, dtype=float)
    nodes, weights = golub_welsch(np.sqrt(k / 2.0), math.sqrt(math.pi))
    return QuadratureRule(nodes, weights, order, "hermite")


@functools.lru_cache(maxsize=32)
def legendre_rule(order: int = DEFAULT_ORDER) -> QuadratureRule:
    k = np.arange(1, order, dtype=float)
    nodes, weights = golub_welsch(k / np.sqrt(4.0 * k * k - 1.0), 2.0)
    return QuadratureRule(nodes, weights, order, "legendre")


def default_rule(order: int = DEFAULT_ORDER) -> QuadratureRule:
    return legendre_rule(order)


def _as_pair(p) -> MomentPair:
    return p if isinstance(p, MomentPair) else MomentPair(*p)


def _hermite_moments(p: MomentPair, rule: QuadratureRule) -> Moments:
    r = p.mu + math.sqrt(2.0 * p.nu) * rule.nodes
    f = evaluate(SELU, r)
    scale = 1.0 / math.sqrt(math.pi)
    return Moments(float(rule.weights @ f) * scale, float(rule.weights @ (f * f)) * scale)


def _split_moments(p: MomentPair, rule: QuadratureRule) -> Moments:
    sigma = math.sqrt(p.nu)
    lo_support = p.mu - SUPPORT_WIDTH * sigma
    hi_support = p.mu + SUPPORT_WIDTH * sigma
    m1 = m2 = 0.0
    for lo, hi in ((lo_support, min(0.0, hi_support)), (max(0.0, lo_support), hi_support)):
        if hi <= lo:
            continue
        half = 0.5 * (hi - lo)
        r = 0.5 * (hi + lo) + half * rule.nodes
        density = np.exp(-0.5 * ((r - p.mu) / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
        w = half * rule.weights * density
        f = evaluate(SELU, r)
        m1 += float(w @ f)
        m2 += float(w @ (f * f))
    return Moments(m1, m2)


def selu_moment_map(p, rule: Optional[QuadratureRule] = None) -> Moments:
    """``(E[selu(r)], E[selu(r)^2])`` for ``r ~ N(p.mu, p.nu)``.

    ``p`` may be a :class:`MomentPair` or a ``(mu, nu)`` tuple.  The second
    output is the raw second moment, not the variance.  A Hermite ``rule``
    gives the plain Gauss-Hermite sum; a Legendre rule (the default) gives
    the kink-split integral.

    Raises
    ------
    InvalidVarianceError
        If ``nu <= 0``.
    """
    p = _as_pair(p)
    rule = default_rule() if rule is None else rule
    if rule.order < MIN_ORDER:
        raise ValueError(f"quadrature order must be >= {MIN_ORDER}")
    if rule.family == "hermite":
        return _hermite_moments(p, rule)
    return _split_moments(p, rule)


def selu_moments_closed_form(p) -> Moments:
    """Same map via normal-CDF identities; an independent check on the quadrature."""
    p = _as_pair(p)
    mu, nu = p.mu, p.nu
    s = math.sqrt(nu)
    t = mu / s
    pdf = math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
    cdf_pos, cdf_neg = float(ndtr(t)), float(ndtr(-t))
    pos1 = mu * cdf_pos + s * pdf
    pos2 = (mu * mu + nu) * cdf_pos + mu * s * pdf
    e1 = math.exp(mu + 0.5 * nu + float(log_ndtr(-t - s)))
    e2 = math.exp(2.0 * mu + 2.0 * nu + float(log_ndtr(-t - 2.0 * s)))
    neg1 = e1 - cdf_neg
    neg2 = e2 - 2.0 * e1 + cdf_neg
    return Moments(SELU_A0 * pos1 + SELU_B0 * neg1, SELU_A0**2 * pos2 + SELU_B0**2 * neg2)


def fixed_point_residual(rule: Optional[QuadratureRule] = None) -> float:
    """Euclidean distance between the image of (0, 1) and (0, 1)."""
    m = selu_moment_map(MomentPair(*FIXED_POINT), rule)
    return math.hypot(m.m1 - FIXED_POINT[0], m.m2 - FIXED_POINT[1])


DEFAULT_GRID = tuple(MomentPair(mu, nu) for mu in (-1.0, -0.5, 0.5, 1.0) for nu in (0.25, 0.5, 2.0, 4.0))


@dataclass(frozen=True)
class ScanRow:
    point: MomentPair
    image: Moments
    ratio: float


@dataclass(frozen=True)
class ContractionReport:
    rows: tuple[ScanRow, ...]
    max_ratio: Optional[float]
    worst_point: Optional[MomentPair]

    @property
    def empty(self) -> bool:
        return not self.rows

    @property
    def contracting(self) -> bool:
        """True iff every scanned point moved strictly closer to (0, 1)."""
        return self.max_ratio is not None and self.max_ratio < 1.0


def contraction_scan(grid: Sequence = DEFAULT_GRID, rule: Optional[QuadratureRule] = None) -> ContractionReport:
    """Distance ratio ``|c(p) - (0,1)| / |p - (0,1)|`` at every grid point.

    An empty grid gives a report with ``max_ratio=None``.
    """
    rows = []
    for p in grid:
        p = _as_pair(p)
        dist = p.distance_to_fixed_point()
        if dist < 1e-3:
            raise ValueError(f"grid point {p} lies within 1e-3 of the fixed point")
        image = selu_moment_map(p, rule)
        ratio = math.hypot(image.m1 - FIXED_POINT[0], image.m2 - FIXED_POINT[1]) / dist
        rows.append(ScanRow(p, image, ratio))
    if not rows:
        return ContractionReport((), None, None)
    worst = max(rows, key=lambda row: row.ratio)
    return ContractionReport(tuple(rows), worst.ratio, worst.point)
