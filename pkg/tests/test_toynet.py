import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actcheck.calculus import central_difference
from actcheck.core import Activation
from actcheck.exceptions import DimensionMismatch, NotCollapsibleError
from actcheck.toynet import (
    DyingReluState,
    NeuronParams,
    SimulationConfig,
    SplitMix64,
    TwoLayerParams,
    draw_samples,
    dying_relu_gradient,
    dying_relu_loss,
    dying_relu_predict,
    dying_relu_step,
    linear_collapse,
    neuron_eval,
    read_samples_csv,
    run_dying_relu_sim,
    two_layer_eval,
)

LIN, RELU, TANH = Activation("linear"), Activation("relu"), Activation("tanh")
positive = st.floats(0.01, 5.0)


class TestNeuron:
    def test_relu(self):
        assert neuron_eval(NeuronParams(0.0, [1.0, 1.0], RELU), [-2.0, 1.0]) == 0.0

    def test_linear_bias_only(self):
        assert neuron_eval(NeuronParams(1.0, [0.0], LIN), [7.0]) == 1.0

    def test_logistic(self):
        assert neuron_eval(NeuronParams(0.0, [2.0], Activation("logistic")), [0.0]) == 0.5

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            neuron_eval(NeuronParams(0.0, [1.0, 2.0]), [1.0])
        with pytest.raises(DimensionMismatch):
            NeuronParams(0.0, [])


class TestTwoLayer:
    def test_linear_cancellation(self):
        net = TwoLayerParams((NeuronParams(0, [1.0]), NeuronParams(0, [-1.0])), 0.0, [1.0, 1.0])
        for x in np.linspace(-3, 3, 13):
            assert two_layer_eval(net, [x]) == 0.0

    def test_relu_pair(self):
        net = TwoLayerParams((NeuronParams(0, [1.0], RELU), NeuronParams(0, [-1.0], RELU)), 0.0, [1.0, -1.0])
        assert two_layer_eval(net, [3.0]) == 3.0

    def test_reproduces_toy_model(self):
        g, t = 0.7, -1.3
        net = TwoLayerParams((NeuronParams(0.0, [t], TANH),), 0.0, [g], RELU)
        for x in np.linspace(-1, 1, 11):
            assert two_layer_eval(net, [x]) == dying_relu_predict(g, t, x)

    def test_shape_checks(self):
        with pytest.raises(DimensionMismatch):
            TwoLayerParams((NeuronParams(0, [1.0]), NeuronParams(0, [1.0, 2.0])), 0.0, [1.0, 1.0])
        with pytest.raises(DimensionMismatch):
            TwoLayerParams((NeuronParams(0, [1.0]),), 0.0, [1.0, 1.0])
        with pytest.raises(DimensionMismatch):
            TwoLayerParams((), 0.0, [])


class TestLinearCollapse:
    def test_substitution(self):
        flat = linear_collapse(TwoLayerParams((NeuronParams(3.0, [4.0]),), 1.0, [2.0]))
        assert flat.bias == 7.0 and list(flat.weights) == [8.0]

    def test_random_networks(self):
        rng = np.random.default_rng(5)
        net = TwoLayerParams(
            tuple(NeuronParams(rng.normal(), rng.normal(size=3)) for _ in range(5)), rng.normal(), rng.normal(size=5)
        )
        flat = linear_collapse(net)
        for x in rng.normal(size=(100, 3)):
            assert neuron_eval(flat, x) == pytest.approx(two_layer_eval(net, x), abs=1e-12)

    def test_nonlinear_rejected(self):
        with pytest.raises(NotCollapsibleError):
            linear_collapse(TwoLayerParams((NeuronParams(0, [1.0], RELU),), 0.0, [1.0]))
        with pytest.raises(NotCollapsibleError):
            linear_collapse(TwoLayerParams((NeuronParams(0, [1.0]),), 0.0, [1.0], TANH))

    @settings(max_examples=40)
    @given(st.integers(1, 6), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_identity_property(self, w, d, seed):
        rng = np.random.default_rng(seed)
        net = TwoLayerParams(
            tuple(NeuronParams(rng.normal(), rng.normal(size=d)) for _ in range(w)), rng.normal(), rng.normal(size=w)
        )
        flat = linear_collapse(net)
        x = rng.normal(size=d)
        assert neuron_eval(flat, x) == pytest.approx(two_layer_eval(net, x), abs=1e-12)


class TestDyingReluStep:
    def test_negative_input_freezes(self):
        state = DyingReluState(1.5, 0.8)
        new = dying_relu_step(state, (-0.4, 0.9), 0.5)
        assert (new.gamma, new.theta) == (1.5, 0.8)
        rec = new.activity_log[-1]
        assert not rec.active and rec.grad_gamma == 0.0 and rec.grad_theta == 0.0
        assert math.copysign(1.0, rec.grad_gamma) == 1.0

    def test_positive_input_updates(self):
        new = dying_relu_step(DyingReluState(1.0, 1.0), (0.5, 0.0), 0.1)
        rec = new.activity_log[-1]
        assert rec.active and (rec.grad_gamma != 0.0 or rec.grad_theta != 0.0)
        assert (new.gamma, new.theta) != (1.0, 1.0)

    def test_zero_residual(self):
        g, t, x = -1.2, -0.7, 0.9
        y = dying_relu_predict(g, t, x)
        gg, gt, active = dying_relu_gradient(g, t, x, y)
        assert (gg, gt) == (0.0, 0.0) and active

    def test_kink_uses_zero_derivative(self):
        gg, gt, active = dying_relu_gradient(1.0, 1.0, 0.0, 1.0)
        assert (gg, gt, active) == (0.0, 0.0, False)

    def test_log_length_invariant(self):
        s = DyingReluState(1.0, 1.0)
        for x in (0.3, -0.2, 0.1):
            s = dying_relu_step(s, (x, 0.5), 0.1)
        assert s.step_index == 3 == len(s.activity_log)
        with pytest.raises(ValueError):
            DyingReluState(1.0, 1.0, 2, ())

    @given(positive, positive, st.floats(-1.0, -1e-9), st.floats(0, 1), st.floats(0, 10))
    def test_freeze_is_bitwise(self, g, t, x, y, step):
        new = dying_relu_step(DyingReluState(g, t), (x, y), step)
        assert new.gamma == g and new.theta == t

    @settings(max_examples=50)
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1), st.floats(0, 1))
    def test_gradient_matches_finite_differences(self, g, t, x, y):
        if abs(g * math.tanh(t * x)) < 1e-3:
            return  # too close to the relu kink for a central difference
        gg, gt, _ = dying_relu_gradient(g, t, x, y)
        fd_g = central_difference(lambda s: dying_relu_loss(s, t, x, y), g).value
        fd_t = central_difference(lambda s: dying_relu_loss(g, s, x, y), t).value
        assert gg == pytest.approx(fd_g, abs=1e-6 * (1 + abs(gg)))
        assert gt == pytest.approx(fd_t, abs=1e-6 * (1 + abs(gt)))


class TestSplitMix64:
    def test_reference_vector(self):
        rng = SplitMix64(1234567)
        assert [rng.next_u64() for _ in range(3)] == [6457827717110365317, 3203168211198807973, 9817491932198370423]

    def test_uniform_range(self):
        rng = SplitMix64(0)
        u = np.array([rng.uniform() for _ in range(10000)])
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.02

    def test_samples_deterministic(self):
        assert draw_samples(42, 10) == draw_samples(42, 10)
        assert draw_samples(42, 10) != draw_samples(43, 10)
        assert all(-1 <= x < 1 and 0 <= y < 1 for x, y in draw_samples(1, 100))


class TestSimulation:
    def test_all_negative_inputs(self):
        samples = [(-abs(x) - 1e-3, y) for x, y in draw_samples(3, 200)]
        trace = run_dying_relu_sim(SimulationConfig(0.9, 1.1, 0.5, samples=samples))
        assert trace.n_inactive == 200 and trace.n_revitalized == 0
        assert all(r.gamma == 0.9 and r.theta == 1.1 for r in trace.rows)

    def test_alternating_signs_revitalize(self):
        samples = [((-1) ** i * 0.5, 0.7) for i in range(20)]
        trace = run_dying_relu_sim(SimulationConfig(1.0, 1.0, 0.1, samples=samples))
        assert trace.n_revitalized >= 1

    def test_seed_42(self):
        trace = run_dying_relu_sim(SimulationConfig(seed=42, n=100))
        assert len(trace.rows) == 100 and trace.n_revitalized >= 1
        assert trace.to_csv() == run_dying_relu_sim(SimulationConfig(seed=42, n=100)).to_csv()

    def test_zero_step_size(self):
        trace = run_dying_relu_sim(SimulationConfig(0.4, 2.0, 0.0, seed=1, n=50))
        assert all((r.gamma, r.theta) == (0.4, 2.0) for r in trace.rows)

    @pytest.mark.parametrize("kwargs", [{"seed": 1, "n": 0}, {}, {"samples": []}, {"seed": 1, "step_size": -1.0}])
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            run_dying_relu_sim(SimulationConfig(**kwargs))

    def test_csv_layout(self):
        text = run_dying_relu_sim(SimulationConfig(seed=7, n=3)).to_csv()
        lines = text.split("\n")
        assert lines[0] == "step,gamma,theta,grad_gamma,grad_theta,active"
        assert len(lines) == 5 and lines[-1] == ""
        assert "\r" not in text
        step, *floats, active = lines[1].split(",")
        assert step == "1" and active in ("0", "1") and all(repr(float(f)) == f for f in floats)

    def test_final_state_matches_last_row(self):
        trace = run_dying_relu_sim(SimulationConfig(seed=9, n=30))
        assert (trace.final.gamma, trace.final.theta) == (trace.rows[-1].gamma, trace.rows[-1].theta)
        assert trace.final.step_index == 30


class TestSamplesCsv:
    def test_header_and_comments(self):
        rows = read_samples_csv(["x,y", "# note", "-0.5,0.25", "", "0.1,0.9"])
        assert rows == [(-0.5, 0.25), (0.1, 0.9)]

    def test_bad_row(self):
        with pytest.raises(ValueError):
            read_samples_csv(["1,2,3"])
