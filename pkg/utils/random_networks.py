# utils/random_networks.py
import logging
from typing import Optional, Tuple, Union

import networkx as nx
import numpy as np

from core.errors import InvalidParameter
from core.network import Arc, Network

logger = logging.getLogger(__name__)

# How many graphs to draw before giving up on a connected source-sink pair
MAX_ATTEMPTS = 1000

Probability = Union[float, Tuple[float, float]]


def generate_random_network(nodes: int, arcs: int, prob: Probability, seed: int,
                            max_attempts: int = MAX_ATTEMPTS) -> Network:
    """
    Seeded random network with `nodes` nodes and `arcs` arcs where node 1
    reaches node n. `prob` is either one working probability for every arc or
    a (low, high) range each arc's probability is drawn from uniformly.
    Graphs are redrawn until the source and sink are connected.
    """
    if nodes < 2:
        raise InvalidParameter("A random network needs at least two nodes.")
    if not nodes - 1 <= arcs <= nodes * (nodes - 1) // 2:
        raise InvalidParameter(f"{arcs} arcs cannot connect {nodes} nodes without parallel arcs.")
    low, high = (prob, prob) if isinstance(prob, (int, float)) else prob
    if not 0.0 <= low <= high <= 1.0:
        raise InvalidParameter(f"Probabilities must satisfy 0 <= low <= high <= 1, got {prob}.")

    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        graph_seed = int(rng.integers(0, 2 ** 32))
        graph = nx.gnm_random_graph(nodes, arcs, seed=graph_seed)
        if nx.has_path(graph, 0, nodes - 1):
            break
    else:
        raise InvalidParameter(f"No connected network found in {max_attempts} attempts.")

    logger.debug(f"Random network n={nodes}, m={arcs} found after {attempt} attempt(s).")
    edges = sorted((min(u, v) + 1, max(u, v) + 1) for u, v in graph.edges())
    probabilities = rng.uniform(low, high, size=len(edges)) if high > low else np.full(len(edges), low)
    return Network(
        node_count=nodes,
        arcs=tuple(Arc(i, u, v) for i, (u, v) in enumerate(edges, start=1)),
        probabilities={i: float(p) for i, p in enumerate(probabilities, start=1)},
        source=1,
        sink=nodes,
    )


def to_graph(net: Network, state: Optional[Tuple[int, ...]] = None) -> nx.Graph:
    """The network (or the working subnetwork for `state`) as a networkx graph."""
    graph = nx.Graph()
    graph.add_nodes_from(range(1, net.node_count + 1))
    for arc_id, u, v in net.arcs:
        if state is None or state[arc_id - 1]:
            graph.add_edge(u, v, arc_id=arc_id, probability=net.probabilities[arc_id])
    return graph
