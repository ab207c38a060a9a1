"""Single neuron, two-layer network, and a toy SGD model of dying relu units.

The toy model is ``p(x) = relu(gamma * tanh(theta * x))`` trained on the
squared loss ``(y - p(x))^2`` by plain SGD.  Whenever ``gamma * tanh(theta x)``
is negative the relu gradient vanishes and the parameters do not move.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Activation, conventional_first_derivative, evaluate, first_derivative
from .exceptions import DimensionMismatch, NotCollapsibleError

LINEAR = Activation("linear")
RELU = Activation("relu")
TANH = Activation("tanh")


@dataclass(frozen=True, eq=False)
class NeuronParams:
    bias: float
    weights: np.ndarray
    activation: Activation = LINEAR

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if w.ndim != 1 or w.size < 1:
            raise DimensionMismatch("weights must be a non-empty vector")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def d(self) -> int:
        return self.weights.size


@dataclass(frozen=True, eq=False)
class TwoLayerParams:
    hidden: tuple[NeuronParams, ...]
    out_bias: float
    out_weights: np.ndarray
    out_activation: Activation = LINEAR

    def __post_init__(self):
        hidden = tuple(self.hidden)
        if not hidden:
            raise DimensionMismatch("at least one hidden neuron is required")
        if len({h.d for h in hidden}) != 1:
            raise DimensionMismatch("hidden neurons must share the input dimension")
        gamma = np.atleast_1d(np.asarray(self.out_weights, dtype=float))
        if gamma.shape != (len(hidden),):
            raise DimensionMismatch(f"expected {len(hidden)} output weights, got shape {gamma.shape}")
        gamma.setflags(write=False)
        object.__setattr__(self, "hidden", hidden)
        object.__setattr__(self, "out_weights", gamma)
        object.__setattr__(self, "out_bias", float(self.out_bias))

    @property
    def d(self) -> int:
        return self.hidden[0].d

    @property
    def w(self) -> int:
        return len(self.hidden)


def _check_input(x, d: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (d,):
        raise DimensionMismatch(f"expected input of dimension {d}, got shape {x.shape}")
    return x


def neuron_eval(p: NeuronParams, x) -> float:
    x = _check_input(x, p.d)
    return float(evaluate(p.activation, p.bias + float(p.weights @ x)))


def two_layer_eval(p: TwoLayerParams, x) -> float:
    x = _check_input(x, p.d)
    hidden = np.array([neuron_eval(h, x) for h in p.hidden])
    return float(evaluate(p.out_activation, p.out_bias + float(p.out_weights @ hidden)))


def linear_collapse(p: TwoLayerParams) -> NeuronParams:
    """Rewrite an all-linear two-layer network as one linear neuron.

    Raises
    ------
    NotCollapsibleError
        If any activation in ``p`` is not linear.
    """
    kinds = [h.activation.kind for h in p.hidden] + [p.out_activation.kind]
    if any(k != "linear" for k in kinds):
        raise NotCollapsibleError(f"only all-linear networks collapse; got {sorted(set(kinds))}")
    betas = np.array([h.bias for h in p.hidden])
    thetas = np.stack([h.weights for h in p.hidden])
    kappa = p.out_bias + float(p.out_weights @ betas)
    eta = p.out_weights @ thetas
    return NeuronParams(kappa, eta, LINEAR)


# ---------------------------------------------------------------- dying relu


@dataclass(frozen=True)
class ActivityRecord:
    active: bool
    grad_gamma: float
    grad_theta: float


@dataclass(frozen=True)
class DyingReluState:
    gamma: float
    theta: float
    step_index: int = 0
    activity_log: tuple[ActivityRecord, ...] = ()

    def __post_init__(self):
        if len(self.activity_log) != self.step_index:
            raise ValueError("activity_log length must equal step_index")


def dying_relu_predict(gamma: float, theta: float, x: float) -> float:
    return float(evaluate(RELU, gamma * float(evaluate(TANH, theta * x))))


def dying_relu_loss(gamma: float, theta: float, x: float, y: float) -> float:
    return (y - dying_relu_predict(gamma, theta, x)) ** 2


def dying_relu_gradient(gamma: float, theta: float, x: float, y: float) -> tuple[float, float, bool]:
    """``(dL/dgamma, dL/dtheta, active)`` for one sample.

    The relu derivative at exactly 0 follows the conventional value 0.
    """
    t = float(evaluate(TANH, theta * x))
    eta = gamma * t
    residual = y - float(evaluate(RELU, eta))
    outer = -2.0 * residual * conventional_first_derivative(RELU, eta)
    # + 0.0 turns -0.0 into 0.0 so traces print identically
    grad_gamma = outer * t + 0.0
    grad_theta = outer * gamma * first_derivative(TANH, theta * x).value * x + 0.0
    return grad_gamma, grad_theta, eta > 0.0


def _update(gamma, theta, x, y, step_size):
    gg, gt, active = dying_relu_gradient(gamma, theta, x, y)
    return gamma - step_size * gg, theta - step_size * gt, ActivityRecord(active, gg, gt)


def dying_relu_step(state: DyingReluState, sample: tuple[float, float], step_size: float) -> DyingReluState:
    """One SGD step on a single ``(x, y)`` sample."""
    x, y = map(float, sample)
    gamma, theta, record = _update(state.gamma, state.theta, x, y, step_size)
    return DyingReluState(gamma, theta, state.step_index + 1, state.activity_log + (record,))


class SplitMix64:
    """SplitMix64 generator (Steele, Lea, Flood 2014), 64-bit state.

    ``uniform()`` takes the top 53 bits of each output, giving values in
    ``[0, 1)``.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = int(seed) & self._MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self._MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0**-53)


def draw_samples(seed: int, n: int) -> list[tuple[float, float]]:
    """``n`` pairs with ``x ~ U(-1, 1)`` then ``y ~ U(0, 1)`` drawn in that order."""
    rng = SplitMix64(seed)
    out = []
    for _ in range(n):
        x = rng.uniform(-1.0, 1.0)
        out.append((x, rng.uniform(0.0, 1.0)))
    return out


@dataclass(frozen=True)
class SimulationConfig:
    gamma0: float = 1.0
    theta0: float = 1.0
    step_size: float = 0.1
    samples: Optional[Sequence[tuple[float, float]]] = None
    seed: Optional[int] = None
    n: int = 100

    def resolve_samples(self) -> list[tuple[float, float]]:
        if self.samples is not None:
            samples = [(float(x), float(y)) for x, y in self.samples]
        elif self.seed is not None:
            if self.n < 1:
                raise ValueError("n must be >= 1")
            samples = draw_samples(self.seed, self.n)
        else:
            raise ValueError("either samples or a seed is required")
        if not samples:
            raise ValueError("at least one sample is required")
        return samples


@dataclass(frozen=True)
class TraceRow:
    step: int
    gamma: float
    theta: float
    grad_gamma: float
    grad_theta: float
    active: bool


@dataclass(frozen=True)
class SimulationTrace:
    """Per-step rows (parameters after the update) plus the final state."""

    rows: tuple[TraceRow, ...]
    final: DyingReluState
    initial: tuple[float, float] = field(default=(0.0, 0.0))

    @property
    def n_active(self) -> int:
        return sum(r.active for r in self.rows)

    @property
    def n_inactive(self) -> int:
        return len(self.rows) - self.n_active

    @property
    def n_revitalized(self) -> int:
        """Active steps that directly follow an inactive one."""
        return sum(b.active and not a.active for a, b in zip(self.rows, self.rows[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("step,gamma,theta,grad_gamma,grad_theta,active\n")
        for r in self.rows:
            buf.write(f"{r.step},{r.gamma!r},{r.theta!r},{r.grad_gamma!r},{r.grad_theta!r},{int(r.active)}\n")
        return buf.getvalue()


def run_dying_relu_sim(config: SimulationConfig) -> SimulationTrace:
    if config.step_size < 0 or not math.isfinite(config.step_size):
        raise ValueError("step_size must be finite and >= 0")
    samples = config.resolve_samples()
    gamma, theta = float(config.gamma0), float(config.theta0)
    rows, log = [], []
    for i, (x, y) in enumerate(samples, start=1):
        gamma, theta, record = _update(gamma, theta, x, y, config.step_size)
        log.append(record)
        rows.append(TraceRow(i, gamma, theta, record.grad_gamma, record.grad_theta, record.active))
    final = DyingReluState(gamma, theta, len(log), tuple(log))
    return SimulationTrace(tuple(rows), final, (float(config.gamma0), float(config.theta0)))


def read_samples_csv(lines: Iterable[str]) -> list[tuple[float, float]]:
    """Parse ``x,y`` rows; a header line starting with a letter is skipped."""
    out = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if lineno == 1 and line[0].isalpha():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'x,y', got {line!r}")
        out.append((float(parts[0]), float(parts[1])))
    return out
