# core/enumeration.py
"""
Binary-addition-tree (BAT) enumeration of state vectors, superfamilies of
arc subsets, and the brute-force reliability oracles built on top of them.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from core.errors import InvalidParameter, TooManyArcs
from core.network import Network, PartialAssignment, StateVector
from core.traversal import plsa_connected_batch

logger = logging.getLogger(__name__)


# --- BAT cursor ---

@dataclass
class BatCursor:
    current: List[int]
    exhausted: bool = False

    @classmethod
    def start(cls, length: int) -> "BatCursor":
        if length < 1:
            raise InvalidParameter("BAT needs at least one coordinate.")
        return cls([0] * length)


def bat_next(cursor: BatCursor) -> Optional[StateVector]:
    """
    Binary increment with coordinate 1 as the least significant bit: the
    first failed coordinate becomes 1 and every coordinate before it resets
    to 0. Returns None (and marks the cursor exhausted) from the all-ones vector.
    """
    if cursor.exhausted:
        raise InvalidParameter("BAT cursor is already exhausted.")
    x = cursor.current
    for k, bit in enumerate(x):
        if bit == 0:
            x[k] = 1
            for j in range(k):
                x[j] = 0
            return tuple(x)
    cursor.exhausted = True
    return None


def bat_iter(length: int) -> Iterator[StateVector]:
    """All 2^length vectors in BAT order, starting from the zero vector."""
    cursor = BatCursor.start(length)
    yield tuple(cursor.current)
    while (x := bat_next(cursor)) is not None:
        yield x


# --- Superfamilies ---

@dataclass(frozen=True)
class Superfamily:
    cut_arcs: Tuple[int, ...]
    members: Tuple[PartialAssignment, ...]

    def __len__(self) -> int:
        return len(self.members)


def _check_arcs(arcs: Sequence[int]) -> Tuple[int, ...]:
    arcs = tuple(arcs)
    if not arcs:
        raise InvalidParameter("A superfamily needs at least one arc.")
    if len(set(arcs)) != len(arcs):
        raise InvalidParameter(f"Arc ids must be distinct, got {arcs}.")
    return arcs


def superfamily(arcs: Sequence[int]) -> Superfamily:
    arcs = _check_arcs(arcs)
    members = tuple(PartialAssignment.of(arcs, x) for x in bat_iter(len(arcs)))
    return Superfamily(arcs, members)


def superfamily_nonzero(arcs: Sequence[int]) -> Superfamily:
    """The superfamily without its all-zero member (at least one arc working)."""
    family = superfamily(arcs)
    return Superfamily(family.cut_arcs, family.members[1:])


# --- Exact oracles ---

def _chunk_sum(net: Network, free_idx: np.ndarray, template: np.ndarray,
               start: int, stop: int) -> float:
    masks = np.arange(start, stop, dtype=np.uint64)
    shifts = np.arange(free_idx.size, dtype=np.uint64)
    bits = ((masks[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)

    states = np.broadcast_to(template, (masks.size, net.m)).copy()
    states[:, free_idx] = bits

    p = net.probability_array[free_idx]
    weights = np.prod(np.where(bits, p, 1.0 - p), axis=1)
    connected = plsa_connected_batch(net, states)
    return float(np.sum(weights[connected]))


def conditional_reliability(net: Network, fixed: PartialAssignment,
                            limit: Optional[int] = None, workers: int = 1) -> float:
    """
    Exact Pr(source connects to sink | fixed arc states), enumerating every
    assignment of the free arcs. Chunks are summed in index order, so the
    result does not depend on `workers`.
    """
    net.check_assignment(fixed)
    limit = settings.ENUMERATION_LIMIT if limit is None else limit
    fixed_states = fixed.as_dict()
    free = [a.arc_id for a in net.arcs if a.arc_id not in fixed_states]
    if len(free) > limit:
        raise TooManyArcs(f"{len(free)} free arcs exceed the enumeration limit of {limit}.")

    template = np.zeros(net.m, dtype=bool)
    for arc_id, state in fixed_states.items():
        template[arc_id - 1] = bool(state)
    free_idx = np.array([a - 1 for a in free], dtype=np.intp)

    total = 1 << len(free)
    chunk = settings.ENUMERATION_CHUNK
    bounds = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda b: _chunk_sum(net, free_idx, template, *b), bounds))
    else:
        partials = [_chunk_sum(net, free_idx, template, lo, hi) for lo, hi in bounds]

    logger.debug(f"Enumerated {total} state(s) over {len(free)} free arc(s) in {len(bounds)} chunk(s).")
    return math.fsum(partials)


def exact_reliability(net: Network, limit: Optional[int] = None, workers: int = 1) -> float:
    """Sum of Pr(X) over every state vector X connecting source and sink."""
    limit = settings.ENUMERATION_LIMIT if limit is None else limit
    if net.m > limit:
        raise TooManyArcs(f"Network has {net.m} arcs; the enumeration limit is {limit}.")
    return conditional_reliability(net, PartialAssignment(), limit=limit, workers=workers)
