# core/traversal.py
"""
Layered source-to-sink search (PLSA), breadth-layer decomposition of the
network, layer-cut discovery and selection of the cut used to stratify
cBAT-MCS.
"""
import logging
from dataclasses import dataclass
from typing import AbstractSet, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import EmptyCutList, SinkUnreachable
from core.network import Network, zero_assignment_probability

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LayerDecomposition:
    layers: Tuple[Tuple[int, ...], ...]
    sink_layer: int  # 1-based index of the layer holding the sink
    complete: bool   # expanded until no new node appeared

    @property
    def depth(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class LayerCut:
    arcs: Tuple[int, ...]
    index: int  # boundary k between layers L_k and L_{k+1}

    def __len__(self) -> int:
        return len(self.arcs)


# --- Connectivity ---

def plsa_connected(net: Network, x: Sequence[int]) -> bool:
    """True iff the sink is reachable from the source using only arcs whose state is 1."""
    if len(x) != net.m:
        raise ValueError(f"State vector has length {len(x)}, network has {net.m} arcs.")

    visited = [False] * (net.node_count + 1)
    visited[net.source] = True
    layer = [net.source]
    incidence = net.incidence

    # At most n-1 expansions: each one adds at least one unseen node.
    while layer:
        next_layer = []
        for node in layer:
            for arc_id, neighbour in incidence[node]:
                if x[arc_id - 1] and not visited[neighbour]:
                    if neighbour == net.sink:
                        return True
                    visited[neighbour] = True
                    next_layer.append(neighbour)
        layer = next_layer
    return False


def plsa_connected_batch(net: Network, states: np.ndarray) -> np.ndarray:
    """
    Layered search over many state vectors at once. `states` is a k x m
    boolean matrix (row = state vector); returns a length-k boolean vector.
    Each pass expands the frontier of every row by one layer.
    """
    states = np.asarray(states, dtype=bool)
    if states.ndim != 2 or states.shape[1] != net.m:
        raise ValueError(f"Expected a (k, {net.m}) state matrix, got shape {states.shape}.")

    k = states.shape[0]
    reached = np.zeros((k, net.node_count + 1), dtype=bool)
    reached[:, net.source] = True
    frontier = reached.copy()
    us, vs = net.endpoint_arrays

    for _ in range(net.node_count - 1):
        grown = np.zeros_like(reached)
        for index in range(net.m):
            working = states[:, index]
            u, v = us[index], vs[index]
            grown[:, v] |= frontier[:, u] & working
            grown[:, u] |= frontier[:, v] & working
        grown &= ~reached
        if not grown.any():
            break
        reached |= grown
        frontier = grown
        if reached[:, net.sink].all():
            break
    return reached[:, net.sink].copy()


# --- Layers and layer-cuts ---

def compute_layers(net: Network, full: bool = False) -> LayerDecomposition:
    """
    Breadth layers of the full network from the source. Stops at the layer
    holding the sink unless `full` is set, in which case expansion continues
    until no new node appears.
    """
    seen = {net.source}
    layers: List[Tuple[int, ...]] = [(net.source,)]
    sink_layer = 0

    while True:
        candidates = set()
        for node in layers[-1]:
            for _, neighbour in net.incidence[node]:
                if neighbour not in seen:
                    candidates.add(neighbour)
        if not candidates:
            break
        seen |= candidates
        layers.append(tuple(sorted(candidates)))
        if net.sink in candidates:
            sink_layer = len(layers)
            if not full:
                break

    if sink_layer == 0:
        raise SinkUnreachable(f"Sink {net.sink} is not reachable from source {net.source}.")

    complete = full or sink_layer == len(layers) and not _has_unseen_neighbour(net, layers[-1], seen)
    return LayerDecomposition(tuple(layers), sink_layer, complete)


def _has_unseen_neighbour(net: Network, layer: Sequence[int], seen: AbstractSet[int]) -> bool:
    return any(nb not in seen for node in layer for _, nb in net.incidence[node])


def _boundary_arcs(net: Network, lower: Sequence[int], upper: Sequence[int]) -> Tuple[int, ...]:
    low, high = set(lower), set(upper)
    return tuple(
        arc_id for arc_id, u, v in net.arcs
        if (u in low and v in high) or (u in high and v in low)
    )


def find_layer_cuts(net: Network) -> List[LayerCut]:
    """
    Layer-cuts c_1..c_{j-1}, where c_k holds every arc joining L_k and L_{k+1}
    and L_j is the sink's layer. Boundaries past the sink's layer do not
    separate source from sink and are left to the residual set.
    """
    decomposition = compute_layers(net, full=True)
    cuts = [
        LayerCut(_boundary_arcs(net, decomposition.layers[k - 1], decomposition.layers[k]), k)
        for k in range(1, decomposition.sink_layer)
    ]
    logger.debug(f"Found {len(cuts)} layer-cut(s); residual arcs {residual_arcs(net, cuts)}.")
    return cuts


def residual_arcs(net: Network, cuts: Optional[Sequence[LayerCut]] = None) -> Tuple[int, ...]:
    """Arcs in no returned layer-cut (E minus the union of the cuts)."""
    if cuts is None:
        cuts = find_layer_cuts(net)
    used = {arc_id for cut in cuts for arc_id in cut.arcs}
    return tuple(a.arc_id for a in net.arcs if a.arc_id not in used)


def select_super_cut(net: Network, cuts: Sequence[LayerCut]) -> LayerCut:
    """
    Fewest arcs first; among equally small cuts the one most likely to fail
    entirely (largest Pr(0(C))); remaining ties go to the lowest layer index.
    """
    if not cuts:
        raise EmptyCutList("No layer-cut to choose from.")
    return min(cuts, key=lambda c: (len(c.arcs), -zero_assignment_probability(net, c.arcs), c.index))
