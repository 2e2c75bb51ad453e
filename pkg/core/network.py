# core/network.py
"""
Binary-state network model: an undirected graph whose arcs work independently
with known probabilities, plus the parser/serializer for the line-oriented
network file format and probability evaluation of (partial) state assignments.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np

from core.errors import NetworkFormatError, UnknownArc

logger = logging.getLogger(__name__)

# Position i holds X(a_{i+1}); every element is 0 or 1.
StateVector = Tuple[int, ...]


class Arc(NamedTuple):
    arc_id: int
    u: int
    v: int


@dataclass(frozen=True)
class PartialAssignment:
    """Binary states for a subset of arcs, kept in the given order."""
    entries: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        entries = tuple((int(arc_id), int(state)) for arc_id, state in self.entries)
        seen = set()
        for arc_id, state in entries:
            if state not in (0, 1):
                raise ValueError(f"Arc {arc_id} has state {state}; states must be 0 or 1.")
            if arc_id in seen:
                raise ValueError(f"Arc {arc_id} is assigned twice.")
            seen.add(arc_id)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, arcs: Sequence[int], states: Sequence[int]) -> "PartialAssignment":
        if len(arcs) != len(states):
            raise ValueError(f"{len(arcs)} arcs but {len(states)} states.")
        return cls(tuple(zip(arcs, states)))

    @property
    def arcs(self) -> Tuple[int, ...]:
        return tuple(arc_id for arc_id, _ in self.entries)

    @property
    def states(self) -> Tuple[int, ...]:
        return tuple(state for _, state in self.entries)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Network:
    node_count: int
    arcs: Tuple[Arc, ...]
    probabilities: Mapping[int, float]
    source: int = 1
    sink: int = field(default=0)

    def __post_init__(self):
        arcs = tuple(Arc(int(a), int(u), int(v)) for a, u, v in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "probabilities", MappingProxyType(
            {int(k): float(p) for k, p in dict(self.probabilities).items()}))
        if self.sink == 0:
            object.__setattr__(self, "sink", self.node_count)
        self._validate()

    def _validate(self):
        n = self.node_count
        if n < 1:
            raise NetworkFormatError(f"Node count must be positive, got {n}.")
        for name, node in (("source", self.source), ("sink", self.sink)):
            if not 1 <= node <= n:
                raise NetworkFormatError(f"The {name} {node} is outside 1..{n}.")
        if self.source == self.sink:
            raise NetworkFormatError("Source and sink must be different nodes.")

        pairs = set()
        for index, (arc_id, u, v) in enumerate(self.arcs, start=1):
            if arc_id != index:
                raise NetworkFormatError(f"Arc ids must be dense 1..m; position {index} holds id {arc_id}.")
            if not (1 <= u <= n and 1 <= v <= n):
                raise NetworkFormatError(f"Arc {arc_id} ({u}-{v}) references a node outside 1..{n}.")
            if u == v:
                raise NetworkFormatError(f"Arc {arc_id} is a self-loop on node {u}.")
            pair = (min(u, v), max(u, v))
            if pair in pairs:
                raise NetworkFormatError(f"Arc {arc_id} duplicates the pair {pair[0]}-{pair[1]}.")
            pairs.add(pair)

        if set(self.probabilities) != {arc.arc_id for arc in self.arcs}:
            raise NetworkFormatError("Every arc needs exactly one working probability.")
        for arc_id, p in self.probabilities.items():
            if not 0.0 <= p <= 1.0 or math.isnan(p):
                raise NetworkFormatError(f"Arc {arc_id} has probability {p} outside [0, 1].")

    # --- Basic accessors ---

    @property
    def m(self) -> int:
        return len(self.arcs)

    def arc(self, arc_id: int) -> Arc:
        if not 1 <= arc_id <= self.m:
            raise UnknownArc(f"Arc {arc_id} does not exist (network has {self.m} arcs).")
        return self.arcs[arc_id - 1]

    def probability(self, arc_id: int) -> float:
        self.arc(arc_id)
        return self.probabilities[arc_id]

    def check_assignment(self, pa: PartialAssignment):
        for arc_id in pa.arcs:
            self.arc(arc_id)

    def with_uniform_probability(self, p: float) -> "Network":
        """A copy where every arc works with the same probability p."""
        return Network(self.node_count, self.arcs, {a.arc_id: p for a in self.arcs}, self.source, self.sink)

    # --- Derived views, computed once per instance ---

    @cached_property
    def incidence(self) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        """incidence[node] lists (arc_id, neighbour) in ascending arc id order."""
        lists: List[List[Tuple[int, int]]] = [[] for _ in range(self.node_count + 1)]
        for arc_id, u, v in self.arcs:
            lists[u].append((arc_id, v))
            lists[v].append((arc_id, u))
        return tuple(tuple(items) for items in lists)

    @cached_property
    def probability_array(self) -> np.ndarray:
        values = np.array([self.probabilities[a.arc_id] for a in self.arcs], dtype=np.float64)
        values.setflags(write=False)
        return values

    @cached_property
    def endpoint_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        u = np.array([a.u for a in self.arcs], dtype=np.intp)
        v = np.array([a.v for a in self.arcs], dtype=np.intp)
        u.setflags(write=False)
        v.setflags(write=False)
        return u, v


# --- State packing (bit i-1 <-> arc a_i) ---

def state_from_mask(mask: int, length: int) -> StateVector:
    return tuple((mask >> i) & 1 for i in range(length))


def mask_from_state(x: Sequence[int]) -> int:
    mask = 0
    for i, bit in enumerate(x):
        if bit:
            mask |= 1 << i
    return mask


# --- Probability evaluation ---

def assignment_probability(net: Network, pa: PartialAssignment) -> float:
    """Pr of the given arc states: product of Pr(a) over working arcs and 1-Pr(a) over failed ones."""
    prob = 1.0
    for arc_id, state in pa.entries:
        p = net.probability(arc_id)
        prob *= p if state == 1 else (1.0 - p)
    return prob


def zero_assignment_probability(net: Network, arcs: Iterable[int]) -> float:
    arcs = list(arcs)
    if len(set(arcs)) != len(arcs):
        raise ValueError("Arc ids must be distinct.")
    prob = 1.0
    for arc_id in arcs:
        prob *= 1.0 - net.probability(arc_id)
    return prob


def state_probability(net: Network, x: Sequence[int]) -> float:
    if len(x) != net.m:
        raise ValueError(f"State vector has length {len(x)}, network has {net.m} arcs.")
    return assignment_probability(net, PartialAssignment.of(range(1, net.m + 1), x))


# --- File format ---

def _parse_int(token: str, what: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise NetworkFormatError(f"Expected an integer {what}, got '{token}'.", line_no) from None


def parse_network(text) -> Network:
    """
    Parses the network file format:

        nodes <n>
        source <id>
        sink <id>
        arc <u> <v> <p>     (one line per arc, ids 1..m in file order)

    '#' starts a comment and blank lines are ignored. Accepts a string or any
    iterable of lines.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    header: Dict[str, int] = {}
    expected = ["nodes", "source", "sink"]
    arcs: List[Arc] = []
    probabilities: Dict[int, float] = {}
    pairs = set()

    for line_no, raw in enumerate(lines, start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        keyword = tokens[0].lower()

        if expected:
            if keyword != expected[0]:
                raise NetworkFormatError(f"Expected '{expected[0]}' but found '{tokens[0]}'.", line_no)
            if len(tokens) != 2:
                raise NetworkFormatError(f"'{keyword}' takes exactly one value.", line_no)
            header[keyword] = _parse_int(tokens[1], f"after '{keyword}'", line_no)
            expected.pop(0)
            if keyword == "nodes" and header["nodes"] < 1:
                raise NetworkFormatError("Node count must be positive.", line_no)
            if keyword in ("source", "sink") and not 1 <= header[keyword] <= header["nodes"]:
                raise NetworkFormatError(f"The {keyword} {header[keyword]} is outside 1..{header['nodes']}.", line_no)
            continue

        if keyword != "arc":
            raise NetworkFormatError(f"Unknown directive '{tokens[0]}'.", line_no)
        if len(tokens) != 4:
            raise NetworkFormatError("Arc lines look like 'arc <u> <v> <p>'.", line_no)
        u = _parse_int(tokens[1], "endpoint", line_no)
        v = _parse_int(tokens[2], "endpoint", line_no)
        try:
            p = float(tokens[3])
        except ValueError:
            raise NetworkFormatError(f"Expected a probability, got '{tokens[3]}'.", line_no) from None

        n = header["nodes"]
        if not (1 <= u <= n and 1 <= v <= n):
            raise NetworkFormatError(f"Arc endpoint outside 1..{n}.", line_no)
        if u == v:
            raise NetworkFormatError(f"Self-loop on node {u}.", line_no)
        if not 0.0 <= p <= 1.0:
            raise NetworkFormatError(f"Probability {p} is outside [0, 1].", line_no)
        pair = (min(u, v), max(u, v))
        if pair in pairs:
            raise NetworkFormatError(f"Duplicate arc between nodes {pair[0]} and {pair[1]}.", line_no)
        pairs.add(pair)

        arc_id = len(arcs) + 1
        arcs.append(Arc(arc_id, u, v))
        probabilities[arc_id] = p

    if expected:
        raise NetworkFormatError(f"Missing '{expected[0]}' line.", len(lines) or None)
    if header["source"] == header["sink"]:
        raise NetworkFormatError("Source and sink must be different nodes.")

    net = Network(header["nodes"], tuple(arcs), probabilities, header["source"], header["sink"])
    logger.debug(f"Parsed network with n={net.node_count}, m={net.m}.")
    return net


def serialize_network(net: Network) -> str:
    lines = [f"nodes {net.node_count}", f"source {net.source}", f"sink {net.sink}"]
    lines += [f"arc {u} {v} {net.probabilities[arc_id]!r}" for arc_id, u, v in net.arcs]
    return "\n".join(lines) + "\n"
