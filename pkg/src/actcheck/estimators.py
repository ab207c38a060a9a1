"""scikit-learn compatible wrappers around the activation and toy-model code."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .core import Activation, MaxoutParams, conventional_first_derivative, derivative_array, evaluate, maxout_evaluate
from .toynet import SimulationConfig, dying_relu_predict, run_dying_relu_sim


class ActivationTransformer(TransformerMixin, BaseEstimator):
    """Apply an activation (or its first/second derivative) elementwise.

    Parameters
    ----------
    activation : str
        Activation kind, e.g. ``"swish"``.
    param : float, optional
        Shape parameter for leakyrelu, elu and swish.
    derivative : {0, 1, 2}
        Which derivative to emit.  Undefined entries (kinks) become NaN.
    kink_convention : float, optional
        When set and ``derivative=1``, kinks get the conventional value
        ``left + kink_convention * (right - left)`` instead of NaN.
    """

    def __init__(self, activation="relu", param=None, derivative=0, kink_convention=None):
        self.activation = activation
        self.param = param
        self.derivative = derivative
        self.kink_convention = kink_convention

    def fit(self, X, y=None):
        validate_data(self, X)
        if self.derivative not in (0, 1, 2):
            raise ValueError("derivative must be 0, 1 or 2")
        lam = 0.0 if self.kink_convention is None else self.kink_convention
        self.activation_ = Activation(self.activation, self.param, lam)
        return self

    def transform(self, X):
        check_is_fitted(self, "activation_")
        X = validate_data(self, X, reset=False)
        if self.derivative == 0:
            return np.asarray(evaluate(self.activation_, X), dtype=float)
        flat = X.ravel()
        values, defined = derivative_array(self.activation_, flat, self.derivative)
        if self.derivative == 1 and self.kink_convention is not None:
            for i in np.flatnonzero(~defined):
                values[i] = conventional_first_derivative(self.activation_, flat[i])
        return values.reshape(X.shape)


class MaxoutTransformer(TransformerMixin, BaseEstimator):
    """Row-wise maxout ``max_j (b_j + W_j . x)`` as a single output column."""

    def __init__(self, biases=None, weights=None):
        self.biases = biases
        self.weights = weights

    def fit(self, X, y=None):
        X = validate_data(self, X)
        self.params_ = MaxoutParams(self.biases, self.weights)
        if self.params_.d != X.shape[1]:
            raise ValueError(f"weights expect {self.params_.d} features, got {X.shape[1]}")
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = validate_data(self, X, reset=False)
        return np.array([[maxout_evaluate(self.params_, row)] for row in X])


class DyingReluRegressor(RegressorMixin, BaseEstimator):
    """Fit ``relu(gamma * tanh(theta * x))`` by one pass of plain SGD.

    Samples are visited in the given order.  After ``fit`` the per-step
    history is in ``trace_`` and its activity counts can be read from it.
    """

    def __init__(self, gamma0=1.0, theta0=1.0, step_size=0.1):
        self.gamma0 = gamma0
        self.theta0 = theta0
        self.step_size = step_size

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError("the toy model takes a single feature")
        config = SimulationConfig(self.gamma0, self.theta0, self.step_size, samples=list(zip(X[:, 0], y)))
        self.trace_ = run_dying_relu_sim(config)
        self.gamma_ = self.trace_.final.gamma
        self.theta_ = self.trace_.final.theta
        return self

    def predict(self, X):
        check_is_fitted(self, "trace_")
        X = validate_data(self, X, reset=False)
        return np.array([dying_relu_predict(self.gamma_, self.theta_, x) for x in X[:, 0]])
