# tests/net/test_topology.py
import numpy as np
import pytest

from app.core.errors import ContractViolation
from app.net.topology import OutputMode, ParamVector, Topology


def test_parse_and_dimension():
    topo = Topology.parse("1-3-1")
    assert topo.layer_sizes == (1, 3, 1)
    assert str(topo) == "1-3-1"
    assert topo.dimension == 3 * (1 + 1)
    assert list(topo.hidden_layers) == [2]


def test_dimension_two_hidden_layers(small_topology):
    # layer 2: 3 neurons x (2 + 1), layer 3: 4 neurons x (3 + 1)
    assert small_topology.dimension == 9 + 16
    assert small_topology.output_mode is OutputMode.CLASSIFICATION


@pytest.mark.parametrize("text", ["1-1", "1--2", "a-2-1", "1-0-1"])
def test_malformed_topologies_are_rejected(text):
    with pytest.raises(ContractViolation):
        Topology.parse(text)


def test_beta_index_includes_outgoing_weights(small_topology):
    layout = small_topology.layout
    # neuron (2, 1): own slice [w1, w2, tau], then w^3_{i,1} for i = 1..4
    assert layout.beta_index[(2, 1)].tolist() == [0, 1, 2, 9, 13, 17, 21]
    # last hidden layer: eta only
    assert layout.beta_index[(3, 2)].tolist() == [13, 14, 15, 16]
    assert layout.tau_index(2, 3) == 8


def test_check_neuron_rejects_out_of_range(small_topology):
    with pytest.raises(ContractViolation):
        small_topology.check_neuron(1, 1)
    with pytest.raises(ContractViolation):
        small_topology.check_neuron(2, 4)


def test_param_vector_length_is_checked(small_topology):
    with pytest.raises(ContractViolation):
        ParamVector(small_topology, np.zeros(small_topology.dimension + 1))


def test_param_vector_accessors(small_topology):
    params = ParamVector(small_topology, np.arange(small_topology.dimension, dtype=float))
    assert params.neuron(2, 2).tolist() == [3.0, 4.0, 5.0]
    assert params.tau(2).tolist() == [2.0, 5.0, 8.0]
    assert params.beta(3, 1).tolist() == [9.0, 10.0, 11.0, 12.0]
