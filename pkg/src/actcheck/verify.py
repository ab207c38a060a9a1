"""Self-check suites run by ``actcheck verify``.

Each suite compares an implementation route against an independent one
(finite differences, closed forms, brute evaluation) and reports the worst
deviation seen.  Quoted reference values for constants and the contraction
property of the selu moment map are reported separately as claims: they
describe the mathematics, not the build, so they do not affect the exit code.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import calculus, constants, core, selu, toynet
from .core import Activation

RANGE_SAMPLES = 10**6
DERIVATIVE_GRID = np.concatenate(
    [-np.logspace(-2.0, math.log10(20.0), 100)[::-1], np.logspace(-2.0, math.log10(20.0), 100)]
)
# a few non-default parameters on top of the standard twelve
DERIVATIVE_SET = core.STANDARD_SET + (
    Activation("leakyrelu", 0.5),
    Activation("elu", 2.0),
    Activation("swish", 3.0),
    Activation("swish", 0.0),
)
RANGE_SET = DERIVATIVE_SET + (Activation("elu", 0.0), Activation("leakyrelu", 0.0))


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<22s} worst={self.worst:.3e}  tol={self.tolerance:.0e}  {self.detail}"


@dataclass(frozen=True)
class ClaimResult:
    name: str
    computed: float
    quoted: str
    agrees: bool
    detail: str = ""

    def line(self) -> str:
        status = "AGREES " if self.agrees else "DIFFERS"
        return f"{status} {self.name:<18s} computed={self.computed:.15g}  quoted={self.quoted}  {self.detail}"


@dataclass(frozen=True)
class VerifyReport:
    suites: tuple[SuiteResult, ...]
    claims: tuple[ClaimResult, ...]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def format(self) -> str:
        lines = ["implementation suites"]
        lines += [s.line() for s in self.suites]
        lines.append("")
        lines.append("reference claims (informational; not part of the exit status)")
        lines += [c.line() for c in self.claims]
        lines.append("")
        n_ok = sum(s.passed for s in self.suites)
        lines.append(f"{n_ok}/{len(self.suites)} suites passed")
        return "\n".join(lines) + "\n"


def _scalar_fn(desc: Activation) -> Callable[[float], float]:
    return lambda z: float(core.evaluate(desc, z))


def _rel(a: float, b: float) -> float:
    """Error scaled by ``1 + |b|``; plain relative error is meaningless where f' underflows."""
    return abs(a - b) / (1.0 + abs(b))


# ------------------------------------------------------------------ constants


def suite_constant_roots() -> SuiteResult:
    worst = max(rec.residual for rec in constants.constant_table())
    return SuiteResult("constant-roots", worst <= 1e-12, worst, 1e-12, "residual of every defining equation")


def suite_tanh_d2_grid() -> SuiteResult:
    _, grid_max = constants.tanh_d2_grid_max()
    dev = abs(grid_max - 4.0 / math.sqrt(27.0))
    return SuiteResult("tanh-d2-bound", dev <= 1e-9, dev, 1e-9, "grid maximum of |tanh''| vs 4/sqrt(27)")


# ---------------------------------------------------------------- derivatives


def _derivative_suite(order: int, tol: float) -> SuiteResult:
    worst, where = 0.0, ""
    for desc in DERIVATIVE_SET:
        f = _scalar_fn(desc)
        for z in DERIVATIVE_GRID:
            exact = core.first_derivative(desc, z) if order == 1 else core.second_derivative(desc, z)
            est = calculus.central_difference(f, z, order).value
            err = _rel(est, exact.value)
            if err > worst:
                worst, where = err, f"{desc} at z={z:.4g}"
    detail = f"{len(DERIVATIVE_SET)} activations x {DERIVATIVE_GRID.size} points; worst {where}"
    name = "first-derivative" if order == 1 else "second-derivative"
    return SuiteResult(name, worst <= tol, worst, tol, detail)


def suite_first_derivative() -> SuiteResult:
    return _derivative_suite(1, 1e-6)


def suite_second_derivative() -> SuiteResult:
    return _derivative_suite(2, 1e-4)


def _expected_directional(kind: str, a: float, v: float) -> float:
    # relu: slopes 0 | 1; leakyrelu and elu: slopes a | 1
    left = 0.0 if kind == "relu" else a
    return v if v >= 0 else left * v


def suite_kink_directional() -> SuiteResult:
    cases = [Activation("relu")]
    cases += [Activation("leakyrelu", a) for a in (0.0, 0.01, 0.5)]
    cases += [Activation("elu", a) for a in (0.0, 1.0, 2.0)]
    mismatches, worst_fd = 0, 0.0
    for desc in cases:
        for v in (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0):
            got = core.directional_derivative(desc, 0.0, v)
            if got != _expected_directional(desc.kind, desc.a, v):
                mismatches += 1
            fd = calculus.one_sided_difference(_scalar_fn(desc), 0.0, v).value
            worst_fd = max(worst_fd, abs(fd - got))
    ok = mismatches == 0 and worst_fd <= 1e-8
    return SuiteResult(
        "kink-directional", ok, worst_fd, 1e-8, f"{mismatches} inexact closed-form values; worst is vs one-sided differences"
    )


def suite_identities() -> SuiteResult:
    z = np.concatenate([np.linspace(-20.0, 20.0, 4001), DERIVATIVE_GRID])
    logistic = Activation("logistic")
    errs = {}
    tanh = core.evaluate(Activation("tanh"), z)
    errs["tanh=2s(2z)-1"] = np.max(np.abs(tanh - (2.0 * core.evaluate(logistic, 2.0 * z) - 1.0)))

    # complex-step derivative of log(1 + e^z) is exact to rounding
    h = 1e-30
    sp_prime = np.imag(np.log1p(np.exp(z + 1j * h))) / h
    errs["softplus'=logistic"] = np.max(np.abs(sp_prime - core.evaluate(logistic, z)))
    kernel_sp, _ = core.derivative_array(Activation("softplus"), z, 1)
    errs["softplus' kernel"] = np.max(np.abs(kernel_sp - sp_prime))

    softsign = Activation("softsign")
    d_ss, _ = core.derivative_array(softsign, z, 1)
    errs["softsign'=(1-|s|)^2"] = np.max(np.abs(d_ss - (1.0 - np.abs(core.evaluate(softsign, z))) ** 2))

    swish = Activation("swish", 1.0)
    d_pos, _ = core.derivative_array(swish, z, 1)
    d_neg, _ = core.derivative_array(swish, -z, 1)
    errs["swish'(-z)=1-swish'(z)"] = np.max(np.abs(d_neg - (1.0 - d_pos)))

    name, worst = max(errs.items(), key=lambda kv: kv[1])
    return SuiteResult("identities", worst <= 1e-12, float(worst), 1e-12, f"{len(errs)} identities; worst {name}")


def suite_taylor() -> SuiteResult:
    target = (0.0, 1.0, 0.0, -2.0, 0.0)
    worst_ratio, worst = 0.0, 0.0
    for desc in (Activation("tanh"), Activation("arctan")):
        coeffs = calculus.taylor_coeffs_at_zero(_scalar_fn(desc), 4)
        for n, (c, t) in enumerate(zip(coeffs, target)):
            err = abs(c - t)
            ratio = err / calculus.TAYLOR_TOLERANCES[n]
            if ratio > worst_ratio:
                worst_ratio, worst = ratio, err
    detail = f"orders 0..4 vs (0,1,0,-2,0); per-order tolerances {calculus.TAYLOR_TOLERANCES}"
    return SuiteResult("taylor-tanh-arctan", worst_ratio <= 1.0 and worst <= 1e-3, worst, 1e-3, detail)


# --------------------------------------------------------------------- ranges


def kronecker_samples(n: int, lo: float, hi: float) -> np.ndarray:
    """Golden-ratio low-discrepancy points in ``[lo, hi)``."""
    alpha = (math.sqrt(5.0) - 1.0) / 2.0
    return lo + (hi - lo) * ((0.5 + alpha * np.arange(n)) % 1.0)


def suite_output_range() -> SuiteResult:
    z = kronecker_samples(RANGE_SAMPLES, -15.0, 15.0)
    exits = 0
    for desc in RANGE_SET:
        exits += int(np.count_nonzero(~core.output_range(desc).contains(core.evaluate(desc, z))))
    detail = f"{RANGE_SAMPLES} samples on [-15, 15] for each of {len(RANGE_SET)} activations; {exits} exits"
    return SuiteResult("output-range", exits == 0, float(exits), 0.0, detail)


def _log_gap(desc: Activation, z: np.ndarray, upper: bool) -> Optional[np.ndarray]:
    """log of the exact distance from f(z) to its open bound, computed without f itself."""
    sp = core.softplus
    kind = desc.kind
    if kind == "logistic":
        return -sp(z) if upper else -sp(-z)
    if kind == "tanh":
        return math.log(2.0) - (sp(2.0 * z) if upper else sp(-2.0 * z))
    if kind == "softplus" and not upper:
        return np.where(z < -30.0, z, np.log(np.maximum(sp(z), 1e-300)))
    if kind == "elu" and not upper:
        return math.log(desc.a) + z
    if kind == "selu" and not upper:
        return math.log(core.SELU_B0) + z
    return None


def _closure(interval: core.Interval) -> core.Interval:
    return core.Interval(interval.lo, interval.hi, math.isfinite(interval.lo), math.isfinite(interval.hi))


def suite_range_saturation() -> SuiteResult:
    """On a wide domain, hits on an open bound must be rounding of a sub-ulp gap."""
    z = kronecker_samples(RANGE_SAMPLES, -1e3, 1e3)
    unexplained, hits = 0, 0
    for desc in RANGE_SET:
        interval = core.output_range(desc)
        v = core.evaluate(desc, z)
        inside = interval.contains(v)
        closed = _closure(interval).contains(v)
        unexplained += int(np.count_nonzero(~closed))
        for bound, is_open, upper in ((interval.lo, not interval.lo_closed, False), (interval.hi, not interval.hi_closed, True)):
            on_bound = ~inside & (v == bound)
            if not is_open or not on_bound.any():
                continue
            hits += int(np.count_nonzero(on_bound))
            gap = _log_gap(desc, z[on_bound], upper)
            if gap is None:
                unexplained += int(np.count_nonzero(on_bound))
                continue
            limit = math.log(np.spacing(abs(bound))) if bound != 0 else math.log(5e-324)
            unexplained += int(np.count_nonzero(gap > limit))
    detail = f"[-1e3, 1e3]: {hits} float hits on open bounds, {unexplained} not explained by rounding"
    return SuiteResult("range-saturation", unexplained == 0, float(unexplained), 0.0, detail)


def suite_swish_minimum() -> SuiteResult:
    z1, m = constants.swish_minimum(1.0)
    swish = Activation("swish", 1.0)
    at_root = abs(float(core.evaluate(swish, z1)) - m)
    sampled = core.evaluate(swish, kronecker_samples(RANGE_SAMPLES, -15.0, 15.0))
    gap = float(sampled.min()) - m
    worst = max(at_root, abs(gap))
    ok = worst <= 1e-8 and gap >= -1e-15
    return SuiteResult("swish-minimum", ok, worst, 1e-8, f"f(z1) vs 1+z1 and sampled minimum; z1={z1:.15g}")


def suite_maxout() -> SuiteResult:
    z = np.linspace(-5.0, 5.0, 1001)
    worst = 0.0
    relu_pieces = core.MaxoutParams([0.0, 0.0], [[1.0], [0.0]])
    leaky_pieces = core.MaxoutParams([0.0, 0.0], [[1.0], [0.3]])
    for x in z:
        worst = max(worst, abs(core.maxout_evaluate(relu_pieces, [x]) - float(core.evaluate(Activation("relu"), x))))
        worst = max(worst, abs(core.maxout_evaluate(leaky_pieces, [x]) - float(core.evaluate(Activation("leakyrelu", 0.3), x))))
    return SuiteResult("maxout", worst == 0.0, worst, 0.0, "two-piece maxout reproduces relu and leakyrelu")


# ----------------------------------------------------------------------- selu


def suite_selu_fixed_point() -> SuiteResult:
    res = selu.fixed_point_residual(selu.default_rule(60))
    return SuiteResult("selu-fixed-point", res <= 1e-5, res, 1e-5, "|c(0,1) - (0,1)| at order 60")


def suite_selu_quadrature() -> SuiteResult:
    r40, r60, r80 = (selu.default_rule(n) for n in (40, 60, 80))
    worst_conv = worst_exact = 0.0
    for p in selu.DEFAULT_GRID + (selu.MomentPair(0.0, 1.0),):
        a, b = selu.selu_moment_map(p, r40), selu.selu_moment_map(p, r80)
        worst_conv = max(worst_conv, abs(a.m1 - b.m1), abs(a.m2 - b.m2))
        q, e = selu.selu_moment_map(p, r60), selu.selu_moments_closed_form(p)
        worst_exact = max(worst_exact, abs(q.m1 - e.m1), abs(q.m2 - e.m2))
    ok = worst_conv <= 1e-9 and worst_exact <= 1e-10
    detail = f"order 40 vs 80: {worst_conv:.1e}; order 60 vs normal-CDF closed form: {worst_exact:.1e} (tol 1e-10)"
    return SuiteResult("selu-quadrature", ok, worst_conv, 1e-9, detail)


def suite_selu_second_moment() -> SuiteResult:
    worst = -math.inf
    for mu in np.linspace(-3.0, 3.0, 13):
        for nu in (1e-6, 0.01, 0.25, 1.0, 4.0, 9.0):
            m = selu.selu_moment_map((mu, nu))
            worst = max(worst, m.m1 * m.m1 - m.m2)
    return SuiteResult("selu-second-moment", worst <= 1e-12, max(worst, 0.0), 1e-12, "m2 >= m1^2 on a 13 x 6 grid")


# --------------------------------------------------------------------- toynet


def _rng_normals(rng: toynet.SplitMix64, n: int) -> np.ndarray:
    # Box-Muller on the package generator keeps the suite reproducible
    out = []
    while len(out) < n:
        u1, u2 = 1.0 - rng.uniform(), rng.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        out += [r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)]
    return np.array(out[:n])


def suite_linear_collapse() -> SuiteResult:
    rng = toynet.SplitMix64(2024)
    lin = Activation("linear")
    worst = 0.0
    for draw in range(100):
        w, d = 1 + draw % 5, 1 + draw % 3
        hidden = tuple(toynet.NeuronParams(*_rng_normals(rng, 1), _rng_normals(rng, d), lin) for _ in range(w))
        net = toynet.TwoLayerParams(hidden, _rng_normals(rng, 1)[0], _rng_normals(rng, w), lin)
        flat = toynet.linear_collapse(net)
        for _ in range(100):
            x = _rng_normals(rng, d)
            worst = max(worst, abs(toynet.neuron_eval(flat, x) - toynet.two_layer_eval(net, x)))
    return SuiteResult("linear-collapse", worst <= 1e-12, worst, 1e-12, "100 random networks x 100 inputs")


def suite_dying_relu_freeze() -> SuiteResult:
    rng = toynet.SplitMix64(7)
    moved = 0
    for _ in range(1000):
        state = toynet.DyingReluState(rng.uniform(0.01, 3.0), rng.uniform(0.01, 3.0))
        sample = (rng.uniform(-1.0, -1e-6), rng.uniform(0.0, 1.0))
        new = toynet.dying_relu_step(state, sample, rng.uniform(0.0, 1.0))
        moved += new.gamma != state.gamma or new.theta != state.theta or new.activity_log[-1].active
    return SuiteResult("dying-relu-freeze", moved == 0, float(moved), 0.0, "1000 steps with gamma, theta > 0 and x < 0")


def suite_dying_relu_gradient() -> SuiteResult:
    rng = toynet.SplitMix64(11)
    worst, checked = 0.0, 0
    while checked < 50:
        g, t, x, y = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(0, 1)
        if abs(g * math.tanh(t * x)) < 1e-2:
            continue  # keep clear of the relu kink
        gg, gt, _ = toynet.dying_relu_gradient(g, t, x, y)
        fd_g = calculus.central_difference(lambda s: toynet.dying_relu_loss(s, t, x, y), g).value
        fd_t = calculus.central_difference(lambda s: toynet.dying_relu_loss(g, s, x, y), t).value
        worst = max(worst, _rel(fd_g, gg), _rel(fd_t, gt))
        checked += 1
    return SuiteResult("dying-relu-gradient", worst <= 1e-6, worst, 1e-6, "50 random states vs central differences")


def suite_rng_reference() -> SuiteResult:
    # published SplitMix64 outputs for seed 1234567
    expected = (6457827717110365317, 3203168211198807973, 9817491932198370423)
    rng = toynet.SplitMix64(1234567)
    bad = sum(rng.next_u64() != e for e in expected)
    return SuiteResult("splitmix64-reference", bad == 0, float(bad), 0.0, "first three outputs for seed 1234567")


SUITES: tuple[Callable[[], SuiteResult], ...] = (
    suite_constant_roots,
    suite_tanh_d2_grid,
    suite_first_derivative,
    suite_second_derivative,
    suite_kink_directional,
    suite_identities,
    suite_taylor,
    suite_output_range,
    suite_range_saturation,
    suite_swish_minimum,
    suite_maxout,
    suite_selu_fixed_point,
    suite_selu_quadrature,
    suite_selu_second_moment,
    suite_linear_collapse,
    suite_dying_relu_freeze,
    suite_dying_relu_gradient,
    suite_rng_reference,
)


def reference_claims(rule: Optional[selu.QuadratureRule] = None) -> tuple[ClaimResult, ...]:
    claims = []
    for rec in constants.constant_table():
        if rec.quoted_value is None:
            continue
        detail = f"|diff|={rec.deviation:.2e} tol={rec.tolerance:.0e}"
        claims.append(ClaimResult(rec.name, rec.value, repr(rec.quoted_value), not rec.mismatch, detail))
    report = selu.contraction_scan(selu.DEFAULT_GRID, rule)
    wp = report.worst_point
    claims.append(
        ClaimResult(
            "selu-contraction",
            report.max_ratio,
            "max_ratio < 1",
            report.contracting,
            f"worst at (mu={wp.mu:g}, nu={wp.nu:g}) over {len(report.rows)} grid points",
        )
    )
    return tuple(claims)


def _guarded(suite: Callable[[], SuiteResult]) -> SuiteResult:
    start = time.perf_counter()
    try:
        result = suite()
    except Exception as exc:  # a crashing suite is a failing suite
        name = suite.__name__.removeprefix("suite_").replace("_", "-")
        result = SuiteResult(name, False, math.inf, 0.0, f"raised {type(exc).__name__}: {exc}")
    return SuiteResult(**{**result.__dict__, "seconds": time.perf_counter() - start})


def run_all() -> VerifyReport:
    return VerifyReport(tuple(_guarded(s) for s in SUITES), reference_claims())
