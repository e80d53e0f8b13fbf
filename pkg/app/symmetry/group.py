# app/symmetry/group.py

"""
Enumeration of the full composite symmetry group of a topology.

A group element is one `LayerMap` per hidden layer. A layer map (signs, perm)
sends beta-block n to signs[n] * (old beta-block perm[n]); maps of different
layers commute, so the group is the direct product of the per-layer groups
of size 2^{N_l} N_l!.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from app.net.topology import ParamVector, Topology
from app.symmetry.operators import group_size


@dataclass(frozen=True, eq=False)
class LayerMap:
    layer: int
    signs: np.ndarray  # (N_l,) of +-1.0
    perm: np.ndarray  # (N_l,) zero-based source neuron per target position

    @property
    def is_identity(self) -> bool:
        return bool(np.all(self.signs > 0) and np.array_equal(self.perm, np.arange(len(self.perm))))


def apply_layer_map(topology: Topology, data: np.ndarray, lmap: LayerMap) -> np.ndarray:
    """Return a transformed copy of the raw vector `data`."""
    beta = topology.beta_matrix(lmap.layer)
    out = data.copy()
    out[beta] = lmap.signs[:, None] * data[beta[lmap.perm]]
    return out


def layer_sign_patterns(size: int) -> np.ndarray:
    """All 2^N sign vectors, the all-positive one first."""
    return np.array(list(itertools.product((1.0, -1.0), repeat=size)))


def layer_permutations(size: int) -> np.ndarray:
    """All N! permutations in lexicographic order, identity first."""
    return np.array(list(itertools.permutations(range(size))), dtype=np.intp)


def layer_maps(topology: Topology, layer: int) -> List[LayerMap]:
    size = topology.size(layer)
    signs = layer_sign_patterns(size)
    return [
        LayerMap(layer, s, p)
        for p in layer_permutations(size)
        for s in signs
    ]


@dataclass(frozen=True, eq=False)
class GroupElement:
    maps: Tuple[LayerMap, ...]

    @property
    def is_identity(self) -> bool:
        return all(m.is_identity for m in self.maps)

    def apply_array(self, topology: Topology, data: np.ndarray) -> np.ndarray:
        out = np.asarray(data, dtype=float)
        for lmap in self.maps:
            out = apply_layer_map(topology, out, lmap)
        return out

    def apply(self, params: ParamVector) -> ParamVector:
        return params.with_data(self.apply_array(params.topology, params.data))


class SymmetryGroup:
    """
    Lazy cursor over every composite operator of one topology.

    Elements come out layer-major (layer 2 varies slowest), each layer's
    maps permutation-major, so the identity is always the first element.
    """

    def __init__(self, topology: Topology) -> None:
        self.topology = topology

    @property
    def size(self) -> int:
        return group_size(self.topology)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[GroupElement]:
        per_layer = [layer_maps(self.topology, layer) for layer in self.topology.hidden_layers]
        for combo in itertools.product(*per_layer):
            yield GroupElement(tuple(combo))


def enumerate_group(topology: Topology) -> Iterator[GroupElement]:
    return iter(SymmetryGroup(topology))
