# tests/conftest.py
import pytest

from core.network import parse_network
from utils.random_networks import generate_random_network

BRIDGE_TEXT = """\
# bridge
nodes 4
source 1
sink 4
arc 1 2 0.9
arc 1 3 0.8
arc 2 3 0.7
arc 2 4 0.6
arc 3 4 0.5
"""

BRIDGE_RELIABILITY = 0.766


@pytest.fixture
def bridge():
    return parse_network(BRIDGE_TEXT)


@pytest.fixture
def path3():
    return parse_network("nodes 3\nsource 1\nsink 3\narc 1 2 0.9\narc 2 3 0.8\n")


@pytest.fixture
def single_arc():
    return parse_network("nodes 2\nsource 1\nsink 2\narc 1 2 0.9\n")


def random_networks(count: int = 25, max_arcs: int = 12):
    """Seeded random networks with n <= 8 and m <= max_arcs."""
    networks = []
    for seed in range(count):
        nodes = 4 + seed % 5
        arcs = min(max_arcs, nodes * (nodes - 1) // 2, nodes + 1 + seed % 5)
        networks.append(generate_random_network(nodes, arcs, (0.3, 0.95), seed))
    return networks


@pytest.fixture(scope="session")
def random_nets():
    return random_networks()
