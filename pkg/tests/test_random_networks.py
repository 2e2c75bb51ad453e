import networkx as nx
import pytest

from core.errors import InvalidParameter
from core.network import parse_network, serialize_network
from utils.random_networks import generate_random_network, to_graph


def test_shape_and_connectivity():
    net = generate_random_network(8, 12, 0.9, seed=1)
    assert net.node_count == 8 and net.m == 12
    assert net.source == 1 and net.sink == 8
    assert set(net.probabilities.values()) == {0.9}
    assert nx.has_path(to_graph(net), 1, 8)


def test_same_seed_same_network():
    a = generate_random_network(7, 10, (0.5, 0.95), seed=4)
    b = generate_random_network(7, 10, (0.5, 0.95), seed=4)
    assert serialize_network(a) == serialize_network(b)
    c = generate_random_network(7, 10, (0.5, 0.95), seed=5)
    assert serialize_network(a) != serialize_network(c)


def test_probability_range():
    net = generate_random_network(6, 9, (0.2, 0.4), seed=3)
    assert all(0.2 <= p <= 0.4 for p in net.probabilities.values())


def test_round_trip_through_file_format():
    net = generate_random_network(6, 8, (0.1, 0.9), seed=2)
    again = parse_network(serialize_network(net))
    assert again.arcs == net.arcs
    assert dict(again.probabilities) == dict(net.probabilities)


@pytest.mark.parametrize("nodes, arcs, prob", [
    (1, 0, 0.5),
    (4, 2, 0.5),
    (4, 7, 0.5),
    (4, 4, 1.5),
    (4, 4, (0.8, 0.2)),
])
def test_rejects_bad_parameters(nodes, arcs, prob):
    with pytest.raises(InvalidParameter):
        generate_random_network(nodes, arcs, prob, seed=0)


def test_to_graph_respects_state(bridge):
    graph = to_graph(bridge, (1, 0, 0, 0, 1))
    assert set(graph.edges()) == {(1, 2), (3, 4)}
    assert graph.number_of_nodes() == 4
