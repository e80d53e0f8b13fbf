# app/symmetry/operators.py

"""
Point and permutation symmetry operators on the hidden-layer parameters.

Both operators act on whole beta-blocks: the point operator O^l_n negates
the block of neuron (l, n), the permutation operator P^l_{j,k} exchanges
the blocks of neurons j and k. Since blocks of the last hidden layer hold
only eta, operators on that layer leave theta's output-layer counterpart to
the least-squares re-fit (or to `SymmetryOp.transform_output_weights` when
the output weights are carried along explicitly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple, Union

import numpy as np

from app.core.errors import ContractViolation
from app.net.network import OutputWeights
from app.net.topology import ParamVector, Topology


@dataclass(frozen=True)
class PointFlip:
    layer: int
    neuron: int


@dataclass(frozen=True)
class Swap:
    layer: int
    j: int
    k: int


Step = Union[PointFlip, Swap]


@dataclass(frozen=True)
class BetaBlock:
    layer: int
    neuron: int
    values: np.ndarray


def _check_swap(topology: Topology, layer: int, j: int, k: int) -> None:
    topology.check_neuron(layer, j)
    topology.check_neuron(layer, k)
    if j == k:
        raise ContractViolation(f"permutation needs two distinct neurons, got {j} twice")


def apply_point(params: ParamVector, l: int, n: int) -> ParamVector:
    """O^l_n: negate eta^l_n and, below the last hidden layer, w^{l+1}_{i,n}."""
    topology = params.topology
    topology.check_neuron(l, n)
    data = params.data.copy()
    idx = topology.layout.beta_index[(l, n)]
    data[idx] = -data[idx]
    return params.with_data(data)


def apply_perm(params: ParamVector, l: int, j: int, k: int) -> ParamVector:
    """P^l_{j,k}: exchange eta^l_j <-> eta^l_k and w^{l+1}_{i,j} <-> w^{l+1}_{i,k}."""
    topology = params.topology
    _check_swap(topology, l, j, k)
    data = params.data.copy()
    idx_j = topology.layout.beta_index[(l, j)]
    idx_k = topology.layout.beta_index[(l, k)]
    data[idx_j], data[idx_k] = params.data[idx_k], params.data[idx_j]
    return params.with_data(data)


def beta_blocks(params: ParamVector, layer: int) -> List[BetaBlock]:
    topology = params.topology
    if layer not in topology.hidden_layers:
        raise ContractViolation(f"layer {layer} is not a hidden layer of {topology}")
    return [
        BetaBlock(layer, n, params.data[topology.layout.beta_index[(layer, n)]])
        for n in range(1, topology.size(layer) + 1)
    ]


def group_size(topology: Topology) -> int:
    """Number of symmetric replicas: prod over hidden layers of 2^{N_l} N_l!."""
    total = 1
    for layer in topology.hidden_layers:
        n = topology.size(layer)
        total *= (2**n) * math.factorial(n)
    return total


@dataclass(frozen=True)
class SymmetryOp:
    """Composite operator, applied step by step in order."""

    steps: Tuple[Step, ...] = ()

    @classmethod
    def identity(cls) -> "SymmetryOp":
        return cls(())

    @classmethod
    def of(cls, steps: Iterable[Step]) -> "SymmetryOp":
        return cls(tuple(steps))

    @classmethod
    def random(cls, topology: Topology, rng: np.random.Generator, length: int = 6) -> "SymmetryOp":
        steps: List[Step] = []
        layers = list(topology.hidden_layers)
        for _ in range(length):
            layer = int(rng.choice(layers))
            size = topology.size(layer)
            if size >= 2 and rng.random() < 0.5:
                j, k = rng.choice(size, 2, replace=False) + 1
                steps.append(Swap(layer, int(j), int(k)))
            else:
                steps.append(PointFlip(layer, int(rng.integers(size)) + 1))
        return cls(tuple(steps))

    def then(self, other: "SymmetryOp") -> "SymmetryOp":
        return SymmetryOp(self.steps + other.steps)

    def inverse(self) -> "SymmetryOp":
        # every primitive step is its own inverse
        return SymmetryOp(tuple(reversed(self.steps)))

    def apply(self, params: ParamVector) -> ParamVector:
        for step in self.steps:
            if isinstance(step, PointFlip):
                params = apply_point(params, step.layer, step.neuron)
            else:
                params = apply_perm(params, step.layer, step.j, step.k)
        return params

    def transform_output_weights(self, topology: Topology, out_weights: OutputWeights) -> OutputWeights:
        """
        Co-transform the output layer so that forward() is unchanged when the
        output weights are carried along instead of re-fitted.
        """
        W = out_weights.W.copy()
        last = topology.last_hidden
        for step in self.steps:
            if step.layer != last:
                continue
            if isinstance(step, PointFlip):
                topology.check_neuron(last, step.neuron)
                W[:, step.neuron - 1] = -W[:, step.neuron - 1]
            else:
                _check_swap(topology, last, step.j, step.k)
                W[:, [step.j - 1, step.k - 1]] = W[:, [step.k - 1, step.j - 1]]
        return OutputWeights(W)

    def __len__(self) -> int:
        return len(self.steps)
