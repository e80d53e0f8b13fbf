# app/net/network.py

"""
Feedforward evaluation, output-layer least squares and the training error.

Hidden neurons are tanh units; the output layer is linear (regression) or
tanh (classification) without a shift term. Output weights are never part
of theta: every error evaluation re-solves them from the hidden activations
of the training inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Tuple, Union

import numpy as np
from scipy import linalg

from app.core.errors import ContractViolation
from app.net.topology import OutputMode, ParamVector, Topology, as_param_vector

# targets are multiplied by this before the linear fit of a tanh output layer
CLASSIFICATION_TARGET_SCALE = 20.0
RIDGE_FACTOR = 1e-8
PENALTY_WEIGHT = 50.0


class SupervisedData(Protocol):
    inputs: np.ndarray
    targets: np.ndarray


class PenaltyRescale(str, Enum):
    """Where an infeasible theta is evaluated before the penalty is added."""

    UNIT = "unit"  # theta / ||theta||
    RADIUS = "radius"  # sqrt(D) * theta / ||theta||


@dataclass(frozen=True, eq=False)
class OutputWeights:
    """q x N_{L-1} matrix, row n holds w^L_n."""

    W: np.ndarray

    def __post_init__(self) -> None:
        W = np.atleast_2d(np.asarray(self.W, dtype=float))
        if not np.all(np.isfinite(W)):
            raise ContractViolation("output weights must be finite")
        object.__setattr__(self, "W", W)

    @classmethod
    def zeros(cls, topology: Topology) -> "OutputWeights":
        return cls(np.zeros((topology.output_dim, topology.size(topology.last_hidden))))


@dataclass(frozen=True, eq=False)
class EvaluatedNet:
    params: ParamVector
    out_weights: OutputWeights
    hidden_activations: np.ndarray  # K x N_{L-1}
    fitted: np.ndarray  # K x q output pre-activations on the fitted set

    def predict_from_activations(self) -> np.ndarray:
        return _activate(self.params.topology, self.fitted)


ParamsLike = Union[ParamVector, np.ndarray]


# =============================================================================
# FORWARD PASS
# =============================================================================


def hidden_activations(topology: Topology, params: ParamsLike, inputs: np.ndarray) -> np.ndarray:
    """
    Outputs x^{L-1} of the last hidden layer for a batch of inputs (K x d).
    """
    theta = as_param_vector(topology, params).data
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    if x.shape[1] != topology.input_dim:
        raise ContractViolation(
            f"input dimension {x.shape[1]} does not match topology input {topology.input_dim}"
        )
    for layer in topology.hidden_layers:
        block = topology.layer_block(theta, layer)
        x = np.tanh(x @ block[:, :-1].T + block[:, -1])
    return x


def _activate(topology: Topology, pre: np.ndarray) -> np.ndarray:
    if topology.output_mode is OutputMode.CLASSIFICATION:
        return np.tanh(pre)
    return pre


def _output_layer(topology: Topology, activations: np.ndarray, W: np.ndarray) -> np.ndarray:
    return _activate(topology, activations @ W.T)


def forward(
    topology: Topology,
    params: ParamsLike,
    out_weights: OutputWeights,
    input: np.ndarray,
) -> np.ndarray:
    """
    Network output y_hat for a single input vector of length N_1.
    """
    x = np.asarray(input, dtype=float)
    if x.ndim != 1 or x.shape[0] != topology.input_dim:
        raise ContractViolation(
            f"input must be a vector of length {topology.input_dim}, got shape {x.shape}"
        )
    W = out_weights.W
    if W.shape != (topology.output_dim, topology.size(topology.last_hidden)):
        raise ContractViolation(
            f"output weights shape {W.shape} does not match topology {topology}"
        )
    acts = hidden_activations(topology, params, x[None, :])
    return _output_layer(topology, acts, W)[0]


# =============================================================================
# OUTPUT LAYER LEAST SQUARES
# =============================================================================


def _ridge_fit(X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Ridge minimiser through the SVD of X with filter factors s / (s^2 + lam).

    Returns (W, fitted): W is q x N_{L-1}, fitted = X W^T computed as the
    filtered projection U diag(s^2 / (s^2 + lam)) U^T Y.
    """
    hidden = X.shape[1]
    U, s, Vt = linalg.svd(X, full_matrices=False, lapack_driver="gesvd")
    ridge = RIDGE_FACTOR * float(np.sum(s * s)) / hidden
    if ridge == 0.0:
        return np.zeros((Y.shape[1], hidden)), np.zeros_like(Y)
    coeffs = U.T @ Y
    W = Vt.T @ ((s / (s * s + ridge))[:, None] * coeffs)
    fitted = U @ ((s * s / (s * s + ridge))[:, None] * coeffs)
    return W.T, fitted


def _prepare_fit(
    topology: Topology,
    hidden_activations: np.ndarray,
    targets: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(hidden_activations, dtype=float))
    Y = np.asarray(targets, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] < 1 or X.shape[0] != Y.shape[0]:
        raise ContractViolation(
            f"activations ({X.shape[0]} rows) and targets ({Y.shape[0]} rows) must align and be nonempty"
        )
    hidden = topology.size(topology.last_hidden)
    if X.shape[1] != hidden or Y.shape[1] != topology.output_dim:
        raise ContractViolation(
            f"expected activations K x {hidden} and targets K x {topology.output_dim}, "
            f"got {X.shape} and {Y.shape}"
        )
    if topology.output_mode is OutputMode.CLASSIFICATION:
        Y = CLASSIFICATION_TARGET_SCALE * Y
    return X, Y


def solve_output_weights(
    topology: Topology,
    hidden_activations: np.ndarray,
    targets: np.ndarray,
) -> OutputWeights:
    """
    Ridge least squares for the output layer.

    Classification targets are rescaled by 20 first so that the fit is done
    on the tanh pre-activation. The ridge term is 1e-8 * trace(X^T X) / N_{L-1};
    an all-zero activation matrix gives W = 0.
    """
    W, _ = _ridge_fit(*_prepare_fit(topology, hidden_activations, targets))
    return OutputWeights(W)


def fit(topology: Topology, params: ParamsLike, data: SupervisedData) -> EvaluatedNet:
    """Forward the training inputs once and solve the output layer on them."""
    theta = as_param_vector(topology, params)
    acts = hidden_activations(topology, theta, data.inputs)
    W, fitted = _ridge_fit(*_prepare_fit(topology, acts, data.targets))
    return EvaluatedNet(theta, OutputWeights(W), acts, fitted)


# =============================================================================
# ERRORS
# =============================================================================


def _check_data(data: SupervisedData) -> None:
    if data.inputs is None or len(data.inputs) == 0:
        raise ContractViolation("dataset must not be empty")


def mse(topology: Topology, params: ParamsLike, dataset: SupervisedData) -> float:
    """
    eps = 1/(K q) * sum_k ||y_k - y_hat_k||^2 with output weights re-fitted
    on `dataset`. For classification the error is measured on the
    non-rescaled one-hot targets through the tanh outputs.
    """
    _check_data(dataset)
    net = fit(topology, params, dataset)
    residual = np.asarray(dataset.targets, dtype=float).reshape(len(dataset.inputs), -1)
    residual = residual - net.predict_from_activations()
    return float(np.sum(residual * residual) / residual.size)


def penalized_error(
    topology: Topology,
    params: ParamsLike,
    dataset: SupervisedData,
    rescale: PenaltyRescale = PenaltyRescale.UNIT,
) -> float:
    """
    mse inside the feasible ball ||theta|| <= sqrt(D); outside, mse at a
    rescaled theta plus 50 * (||theta|| - sqrt(D)).

    With the default UNIT rescale the infeasible point is evaluated on the
    unit sphere, so the error jumps at the ball boundary even though the
    penalty term itself vanishes there. RADIUS evaluates on the boundary
    sphere instead and is continuous.
    """
    theta = as_param_vector(topology, params)
    norm = theta.norm()
    radius = float(np.sqrt(theta.dimension))
    if norm <= radius:
        return mse(topology, theta, dataset)
    scale = radius / norm if PenaltyRescale(rescale) is PenaltyRescale.RADIUS else 1.0 / norm
    return mse(topology, theta.data * scale, dataset) + PENALTY_WEIGHT * (norm - radius)


def classification_error_rate(
    topology: Topology,
    params: ParamsLike,
    fit_set: SupervisedData,
    eval_set: SupervisedData,
) -> float:
    """
    Winner-takes-all error rate on `eval_set` with output weights fitted on
    `fit_set`.
    """
    _check_data(fit_set)
    _check_data(eval_set)
    net = fit(topology, params, fit_set)
    acts = hidden_activations(topology, net.params, eval_set.inputs)
    predicted = np.argmax(_output_layer(topology, acts, net.out_weights.W), axis=1)
    truth = np.argmax(np.asarray(eval_set.targets), axis=1)
    return float(np.mean(predicted != truth))


class NetworkObjective:
    """
    Callable penalized training error used by the optimizers.

    Pure: calling it never changes the object, so candidates can be
    evaluated concurrently.
    """

    def __init__(
        self,
        topology: Topology,
        train: SupervisedData,
        rescale: PenaltyRescale = PenaltyRescale.UNIT,
    ) -> None:
        _check_data(train)
        self.topology = topology
        self.train = train
        self.rescale = PenaltyRescale(rescale)

    @property
    def dimension(self) -> int:
        return self.topology.dimension

    def __call__(self, theta: np.ndarray) -> float:
        return penalized_error(self.topology, theta, self.train, self.rescale)
