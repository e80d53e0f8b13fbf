# app/net/topology.py

"""
Network topology and the flat hidden-layer parameter vector.

Layers are numbered the usual way for this model: layer 1 is the input,
layer L the output, layers 2..L-1 are hidden. Neurons are numbered from 1.
The optimizer only sees the hidden-layer parameters

    theta = (lambda^2, ..., lambda^{L-1}),  lambda^l = (eta^l_1, ..., eta^l_{N_l}),
    eta^l_n = (w^l_n, tau^l_n)

so each neuron owns a contiguous slice of N_{l-1} weights followed by its
shift. Output-layer weights live outside theta and are re-fitted by least
squares on every evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from app.core.errors import ContractViolation


class OutputMode(str, Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"


@dataclass(frozen=True)
class ParamLayout:
    """
    Index bookkeeping for one topology.

    `neuron_slices[(l, n)]` is the contiguous slice [w^l_n, tau^l_n] inside
    theta. `beta_index[(l, n)]` lists the theta indices of the symmetry
    relevant block of neuron (l, n): its own parameters followed by the
    outgoing weights w^{l+1}_{i,n}, i = 1..N_{l+1} (none for the last hidden
    layer, whose outgoing weights are the output layer).
    """

    dimension: int
    layer_offsets: Dict[int, int]
    neuron_slices: Dict[Tuple[int, int], slice]
    beta_index: Dict[Tuple[int, int], np.ndarray] = field(repr=False)

    def tau_index(self, layer: int, neuron: int) -> int:
        return self.neuron_slices[(layer, neuron)].stop - 1


@dataclass(frozen=True)
class Topology:
    layer_sizes: Tuple[int, ...]
    output_mode: OutputMode = OutputMode.REGRESSION

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "output_mode", OutputMode(self.output_mode))
        if len(sizes) < 3:
            raise ContractViolation(
                f"topology needs at least one hidden layer, got {list(sizes)}"
            )
        if any(s < 1 for s in sizes):
            raise ContractViolation(f"all layer sizes must be >= 1, got {list(sizes)}")

    @classmethod
    def parse(cls, text: str, output_mode: OutputMode = OutputMode.REGRESSION) -> "Topology":
        """Build a topology from the dash notation used in the docs, e.g. '1-3-1'."""
        try:
            sizes = tuple(int(part) for part in text.strip().split("-"))
        except ValueError as exc:
            raise ContractViolation(f"malformed topology {text!r}") from exc
        return cls(sizes, output_mode)

    def __str__(self) -> str:
        return "-".join(str(s) for s in self.layer_sizes)

    # -------------------------------------------------------------------------
    # Shape helpers
    # -------------------------------------------------------------------------

    @property
    def depth(self) -> int:
        return len(self.layer_sizes)

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    @property
    def hidden_layers(self) -> range:
        """Hidden layer numbers 2..L-1."""
        return range(2, self.depth)

    @property
    def last_hidden(self) -> int:
        return self.depth - 1

    def size(self, layer: int) -> int:
        return self.layer_sizes[layer - 1]

    @property
    def dimension(self) -> int:
        return self.layout.dimension

    def check_neuron(self, layer: int, neuron: int) -> None:
        if layer not in self.hidden_layers:
            raise ContractViolation(
                f"layer {layer} is not a hidden layer of {self} (valid: 2..{self.depth - 1})"
            )
        if not 1 <= neuron <= self.size(layer):
            raise ContractViolation(
                f"neuron {neuron} out of range 1..{self.size(layer)} in layer {layer}"
            )

    # -------------------------------------------------------------------------
    # Layout
    # -------------------------------------------------------------------------

    @cached_property
    def layout(self) -> ParamLayout:
        offsets: Dict[int, int] = {}
        slices: Dict[Tuple[int, int], slice] = {}
        cursor = 0
        for layer in self.hidden_layers:
            offsets[layer] = cursor
            fan_in = self.size(layer - 1)
            for n in range(1, self.size(layer) + 1):
                slices[(layer, n)] = slice(cursor, cursor + fan_in + 1)
                cursor += fan_in + 1

        betas: Dict[Tuple[int, int], np.ndarray] = {}
        for layer in self.hidden_layers:
            for n in range(1, self.size(layer) + 1):
                own = list(range(slices[(layer, n)].start, slices[(layer, n)].stop))
                outgoing: List[int] = []
                if layer < self.last_hidden:
                    # w^{l+1}_{i,n} is the n-th weight of neuron (l+1, i)
                    outgoing = [
                        slices[(layer + 1, i)].start + (n - 1)
                        for i in range(1, self.size(layer + 1) + 1)
                    ]
                betas[(layer, n)] = np.asarray(own + outgoing, dtype=np.intp)

        return ParamLayout(
            dimension=cursor,
            layer_offsets=offsets,
            neuron_slices=slices,
            beta_index=betas,
        )

    def beta_matrix(self, layer: int) -> np.ndarray:
        """Stacked beta indices of one hidden layer, shape (N_l, block length)."""
        return np.vstack(
            [self.layout.beta_index[(layer, n)] for n in range(1, self.size(layer) + 1)]
        )

    def layer_block(self, data: np.ndarray, layer: int) -> np.ndarray:
        """View of layer `layer` parameters as an (N_l, N_{l-1} + 1) matrix."""
        start = self.layout.layer_offsets[layer]
        rows, cols = self.size(layer), self.size(layer - 1) + 1
        return data[start : start + rows * cols].reshape(rows, cols)


@dataclass(frozen=True, eq=False)
class ParamVector:
    """
    Flat hidden-layer parameter vector theta bound to its topology.

    Operations return new vectors; `data` is never mutated in place by this
    package.
    """

    topology: Topology
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 1 or data.shape[0] != self.topology.dimension:
            raise ContractViolation(
                f"parameter vector of length {data.shape} does not match "
                f"dimension {self.topology.dimension} of topology {self.topology}"
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, topology: Topology) -> "ParamVector":
        return cls(topology, np.zeros(topology.dimension))

    @classmethod
    def random(cls, topology: Topology, rng: np.random.Generator, scale: float = 1.0) -> "ParamVector":
        return cls(topology, rng.uniform(-scale, scale, topology.dimension))

    @property
    def dimension(self) -> int:
        return self.data.shape[0]

    def neuron(self, layer: int, n: int) -> np.ndarray:
        """eta^l_n = (w^l_n, tau^l_n) as a copy."""
        self.topology.check_neuron(layer, n)
        return self.data[self.topology.layout.neuron_slices[(layer, n)]].copy()

    def tau(self, layer: int) -> np.ndarray:
        """Shift parameters of every neuron in one hidden layer."""
        return self.topology.layer_block(self.data, layer)[:, -1].copy()

    def beta(self, layer: int, n: int) -> np.ndarray:
        self.topology.check_neuron(layer, n)
        return self.data[self.topology.layout.beta_index[(layer, n)]]

    def with_data(self, data: np.ndarray) -> "ParamVector":
        return ParamVector(self.topology, data)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __iter__(self) -> Iterator[float]:
        return iter(self.data)


def as_param_vector(topology: Topology, values: Sequence[float] | np.ndarray | ParamVector) -> ParamVector:
    if isinstance(values, ParamVector):
        if values.topology != topology:
            raise ContractViolation("parameter vector belongs to a different topology")
        return values
    return ParamVector(topology, np.asarray(values, dtype=float))
