# tests/symmetry/test_group.py
import numpy as np

from app.net.topology import ParamVector, Topology
from app.symmetry.group import SymmetryGroup, enumerate_group
from app.symmetry.operators import group_size


def test_group_enumeration_is_complete_and_distinct(rng):
    topology = Topology((2, 3, 2))
    params = ParamVector.random(topology, rng)
    elements = list(enumerate_group(topology))
    assert len(elements) == group_size(topology) == 48
    assert elements[0].is_identity
    images = {tuple(e.apply(params).data) for e in elements}
    assert len(images) == 48


def test_two_layer_group_has_product_size(rng):
    topology = Topology((2, 2, 2, 1))
    group = SymmetryGroup(topology)
    params = ParamVector.random(topology, rng)
    images = {tuple(e.apply(params).data) for e in group}
    assert len(group) == 64
    assert len(images) == 64


def test_group_elements_preserve_norm(rng):
    topology = Topology((1, 2, 1))
    params = ParamVector.random(topology, rng)
    for element in enumerate_group(topology):
        moved = element.apply(params)
        assert np.array_equal(np.sort(np.abs(moved.data)), np.sort(np.abs(params.data)))
