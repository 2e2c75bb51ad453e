import math

import pytest

from core.errors import InputDataError, NetworkFormatError, UnknownArc
from core.network import (
    Arc,
    Network,
    PartialAssignment,
    assignment_probability,
    mask_from_state,
    parse_network,
    serialize_network,
    state_from_mask,
    state_probability,
    zero_assignment_probability,
)
from tests.conftest import BRIDGE_TEXT


def test_parse_bridge(bridge):
    assert bridge.node_count == 4
    assert bridge.m == 5
    assert bridge.source == 1 and bridge.sink == 4
    assert bridge.arc(3) == Arc(3, 2, 3)
    assert bridge.probability(5) == 0.5


def test_parse_accepts_lines():
    net = parse_network(BRIDGE_TEXT.splitlines())
    assert net.m == 5


@pytest.mark.parametrize("text, line", [
    ("nodes 3\nsource 1\nsink 3\narc 1 2 1.5\n", 4),
    ("nodes 3\nsource 1\nsink 3\narc 1 1 0.5\n", 4),
    ("nodes 3\nsource 1\nsink 3\narc 1 2 0.5\narc 2 1 0.4\n", 5),
    ("nodes 3\nsource 1\nsink 3\narc 1 4 0.5\n", 4),
    ("nodes 3\nsink 3\n", 2),
    ("nodes 3\nsource 1\nsink 3\nedge 1 2 0.5\n", 4),
    ("nodes 3\nsource 1\nsink 3\narc 1 2 high\n", 4),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(NetworkFormatError) as info:
        parse_network(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_parse_error_is_input_data_error():
    with pytest.raises(InputDataError) as info:
        parse_network("nodes 2\nsource 1\nsink 1\n")
    assert info.value.exit_code == 2


def test_comments_and_blank_lines_ignored():
    net = parse_network("# header\n\nnodes 2  # two\nsource 1\nsink 2\n\narc 1 2 0.25 # only arc\n")
    assert net.m == 1 and net.probability(1) == 0.25


def test_serialize_then_parse_is_exact(bridge):
    again = parse_network(serialize_network(bridge))
    assert again.arcs == bridge.arcs
    assert dict(again.probabilities) == dict(bridge.probabilities)


def test_network_rejects_sparse_arc_ids():
    with pytest.raises(NetworkFormatError):
        Network(3, (Arc(1, 1, 2), Arc(3, 2, 3)), {1: 0.5, 3: 0.5}, 1, 3)


def test_unknown_arc(bridge):
    with pytest.raises(UnknownArc):
        bridge.arc(6)
    with pytest.raises(UnknownArc):
        bridge.check_assignment(PartialAssignment.of([1, 9], [0, 1]))


def test_partial_assignment_validation():
    with pytest.raises(ValueError):
        PartialAssignment.of([1, 1], [0, 1])
    with pytest.raises(ValueError):
        PartialAssignment.of([1], [2])
    pa = PartialAssignment.of([4, 5], [1, 0])
    assert pa.arcs == (4, 5) and pa.states == (1, 0) and pa.as_dict() == {4: 1, 5: 0}
    assert len(pa) == 2


def test_assignment_probability(bridge):
    assert math.isclose(assignment_probability(bridge, PartialAssignment.of([4, 5], [1, 0])), 0.3)
    assert math.isclose(assignment_probability(bridge, PartialAssignment.of([1, 2], [0, 0])), 0.02)
    assert assignment_probability(bridge, PartialAssignment()) == 1.0


def test_zero_assignment_probability(bridge):
    assert math.isclose(zero_assignment_probability(bridge, [4, 5]), 0.2)
    assert math.isclose(zero_assignment_probability(bridge, [1, 2]), 0.02)
    with pytest.raises(ValueError):
        zero_assignment_probability(bridge, [4, 4])


def test_state_probabilities_sum_to_one(bridge):
    total = math.fsum(state_probability(bridge, state_from_mask(mask, 5)) for mask in range(32))
    assert abs(total - 1.0) < 1e-12


def test_mask_packing_is_bijective():
    for mask in range(64):
        assert mask_from_state(state_from_mask(mask, 6)) == mask
    assert state_from_mask(1, 5) == (1, 0, 0, 0, 0)


def test_with_uniform_probability(bridge):
    uniform = bridge.with_uniform_probability(0.9)
    assert set(uniform.probabilities.values()) == {0.9}
    assert uniform.arcs == bridge.arcs
    assert bridge.probability(1) == 0.9 and bridge.probability(5) == 0.5


def test_incidence_ordered_by_arc_id(bridge):
    assert bridge.incidence[2] == ((1, 1), (3, 3), (4, 4))
    assert bridge.incidence[4] == ((4, 2), (5, 3))
