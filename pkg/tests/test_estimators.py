import math

import numpy as np
import pytest

from config.settings import settings
from core.enumeration import exact_reliability
from core.errors import BudgetTooSmall, InvalidParameter
from core.estimators import (
    Method,
    StratumResult,
    allocate_budget,
    bat_mcs,
    cbat_mcs,
    crude_mcs,
    crude_variance,
    estimate,
    expected_estimate,
    gamma_estimate,
    integral_budget,
    normalization_factor,
    required_sample_size,
    round_up_budget,
    sample_state,
    variance_scale,
    weighted_estimate,
)
from core.network import PartialAssignment, parse_network, zero_assignment_probability
from core.streams import RandomStream, ReplayStream
from core.traversal import LayerCut, find_layer_cuts
from tests.conftest import BRIDGE_RELIABILITY
from utils.statistics import sample_variance

SUPER_CUT = LayerCut((4, 5), 2)


# --- Formulas ---

def test_normalization_factor_bridge(bridge):
    assert normalization_factor(bridge, SUPER_CUT, 16) == pytest.approx(0.05, abs=1e-15)


def test_gamma_times_passes():
    assert gamma_estimate(0.05, 13) == pytest.approx(0.65, abs=1e-12)


def test_weighted_sum_of_stratum_ratios():
    strata = [
        StratumResult(PartialAssignment.of([1, 2], [0, 0]), 0.02, 1, 0),
        StratumResult(PartialAssignment.of([1, 2], [1, 0]), 0.18, 3, 2),
        StratumResult(PartialAssignment.of([1, 2], [0, 1]), 0.08, 2, 1),
        StratumResult(PartialAssignment.of([1, 2], [1, 1]), 0.72, 10, 8),
    ]
    assert abs(weighted_estimate(strata) - 0.7360) < 1e-12


def test_weighted_skips_empty_strata():
    strata = [
        StratumResult(PartialAssignment.of([1], [0]), 0.0, 0, 0),
        StratumResult(PartialAssignment.of([1], [1]), 1.0, 4, 2),
    ]
    assert weighted_estimate(strata) == 0.5


def test_variance_scale_bridge(bridge):
    assert variance_scale(bridge, SUPER_CUT) == pytest.approx(0.64, abs=1e-12)


def test_crude_variance():
    assert crude_variance(0.5, 100) == 0.0025


def test_normalization_factor_certain_cut(bridge):
    net = bridge.with_uniform_probability(1.0)
    assert normalization_factor(net, SUPER_CUT, 16) == 1 / 16


def test_normalization_factor_fair_coins():
    net = parse_network("nodes 3\nsource 1\nsink 3\narc 1 2 0.5\narc 1 3 0.5\narc 2 3 0.9\n")
    assert normalization_factor(net, LayerCut((1, 2), 1), 3) == 0.25


def test_variance_scale_bounds(bridge, random_nets):
    assert variance_scale(bridge.with_uniform_probability(1.0), SUPER_CUT) == 1.0
    for net in [bridge] + random_nets:
        for cut in find_layer_cuts(net):
            assert 0.0 <= variance_scale(net, cut) <= 1.0


@pytest.mark.parametrize("r, eps, alpha, expected", [
    (0.9, 0.01, 0.05, 4269),
    (0.5, 0.1, 0.05, 385),
])
def test_required_sample_size(r, eps, alpha, expected):
    assert required_sample_size(r, eps, alpha) == expected


@pytest.mark.parametrize("r, eps, alpha", [(0.0, 0.1, 0.05), (0.5, 0.0, 0.05), (0.5, 0.1, 1.0)])
def test_required_sample_size_rejects(r, eps, alpha):
    with pytest.raises(InvalidParameter):
        required_sample_size(r, eps, alpha)


# --- Budget allocation ---

def test_allocation_exact():
    allocation = allocate_budget([0.3, 0.2, 0.3], 16)
    assert allocation.counts == (6, 4, 6)
    assert allocation.exact


def test_allocation_rounded():
    allocation = allocate_budget([0.02, 0.18, 0.08, 0.72], 16)
    assert allocation.counts == (1, 3, 1, 11)
    assert not allocation.exact
    assert allocation.total == 16


def test_allocation_too_small():
    with pytest.raises(BudgetTooSmall):
        allocate_budget([0.5, 0.3, 0.2], 2)


def test_allocation_rejects_zero_probability():
    with pytest.raises(InvalidParameter):
        allocate_budget([0.5, 0.0], 10)


def test_allocation_properties():
    rng = np.random.default_rng(5)
    for _ in range(200):
        k = int(rng.integers(1, 9))
        probs = rng.dirichlet(np.ones(k)).tolist()
        n_sim = int(rng.integers(k, 500))
        counts = allocate_budget(probs, n_sim).counts
        assert sum(counts) == n_sim
        assert min(counts) >= 1
        for i in range(k):
            for j in range(k):
                if probs[i] > probs[j]:
                    assert counts[i] >= counts[j]


def test_integral_budget():
    assert integral_budget([0.3, 0.2, 0.3], 10) == 16
    assert integral_budget([0.3, 0.2, 0.3], 16) == 16


def test_round_up_budget(bridge):
    assert round_up_budget(bridge, Method.CBAT_MCS, 10) == 16
    assert round_up_budget(bridge, "batmcs", 10, beta=2) == 50
    assert round_up_budget(bridge, Method.CRUDE, 10) == 10
    assert allocate_budget([0.02, 0.18, 0.08, 0.72], 50).counts == (1, 9, 4, 36)


# --- Sampling and replay ---

def test_sample_state_draw_order(bridge):
    stream = ReplayStream([0.95, 0.5, 0.5])
    x = sample_state(bridge, PartialAssignment.of([4, 5], [1, 0]), stream)
    assert x == (0, 1, 1, 1, 0)


def test_crude_replay(bridge):
    draws = [0.95, 0.1, 0.1, 0.1, 0.1,   # a2-a5 path works
             0.1, 0.9, 0.9, 0.9, 0.9]    # only a1 works
    result = crude_mcs(bridge, 2, ReplayStream(draws))
    assert result.n_pass == 1
    assert result.value == 0.5
    assert result.per_stratum == ()


def test_cbat_replay(bridge):
    blocks = [
        [0.95, 0.85, 0.0] + [0.0] * 15,   # (x4, x5) = (1, 0): first trial fails
        [0.0] * 12,                       # (0, 1)
        [0.0] * 18,                       # (1, 1)
    ]
    result = cbat_mcs(bridge, 16, ReplayStream(blocks=blocks))
    assert [s.n_sim for s in result.per_stratum] == [6, 4, 6]
    assert [s.n_pass for s in result.per_stratum] == [5, 4, 6]
    assert result.formula == "gamma"
    assert result.cut.arcs == (4, 5)
    assert result.gamma == pytest.approx(0.05, abs=1e-15)
    assert result.value == pytest.approx(0.75, abs=1e-12)


def test_replay_runs_dry(bridge):
    with pytest.raises(InvalidParameter):
        crude_mcs(bridge, 2, ReplayStream([0.1] * 5))


# --- Estimators ---

def test_estimates_reproducible(bridge):
    for method in Method:
        a = estimate(bridge, method, 2000, seed=42, beta=2)
        b = estimate(bridge, method, 2000, seed=42, beta=2)
        assert a.value == b.value
        assert a.n_pass == b.n_pass
        assert a.per_stratum == b.per_stratum


def test_block_size_does_not_change_results(bridge, monkeypatch):
    baseline = [estimate(bridge, method, 1000, seed=9, beta=2).value for method in Method]
    monkeypatch.setattr(settings, "TRIAL_BLOCK_SIZE", 7)
    assert [estimate(bridge, method, 1000, seed=9, beta=2).value for method in Method] == baseline


def test_different_seeds_differ():
    assert not np.array_equal(RandomStream(1).uniform(8), RandomStream(2).uniform(8))
    assert not np.array_equal(RandomStream(1).spawn(0).uniform(8), RandomStream(1).spawn(1).uniform(8))


def test_estimate_ranges(random_nets):
    for index, net in enumerate(random_nets[:10]):
        for method in Method:
            result = estimate(net, method, 500, seed=index, beta=1)
            assert 0.0 <= result.value <= 1.0


@pytest.mark.parametrize("n_sim", [16, 24, 40, 56, 88, 104])
def test_cbat_exact_allocation_is_gamma_multiple(bridge, n_sim):
    for seed in range(20):
        result = estimate(bridge, Method.CBAT_MCS, n_sim, seed=seed)
        assert result.formula == "gamma"
        if result.n_pass == result.n_sim:
            assert result.value == 1.0 - zero_assignment_probability(bridge, SUPER_CUT.arcs)
        else:
            assert result.value == result.gamma * result.n_pass


def test_cbat_rounded_allocation_uses_weighted_sum(bridge):
    result = estimate(bridge, Method.CBAT_MCS, 17, seed=3)
    assert result.formula == "weighted"
    assert result.value == pytest.approx(weighted_estimate(result.per_stratum), abs=1e-12)
    assert sum(s.n_sim for s in result.per_stratum) == 17


def test_all_working_network_is_exactly_one(bridge):
    net = bridge.with_uniform_probability(1.0)
    for method in Method:
        assert estimate(net, method, 100, seed=1, beta=2).value == 1.0


def test_bat_mcs_strata(bridge):
    result = bat_mcs(bridge, 2, 16, RandomStream(4))
    assert [s.assignment.states for s in result.per_stratum] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert [s.n_sim for s in result.per_stratum] == [1, 3, 1, 11]
    assert result.per_stratum[0].n_pass == 0
    assert result.formula == "weighted"


def test_bat_mcs_parameter_checks(bridge):
    with pytest.raises(InvalidParameter):
        bat_mcs(bridge, 0, 100, RandomStream(1))
    with pytest.raises(InvalidParameter):
        bat_mcs(bridge, 5, 100, RandomStream(1))
    with pytest.raises(BudgetTooSmall):
        bat_mcs(bridge, 2, 3, RandomStream(1))
    with pytest.raises(InvalidParameter):
        estimate(bridge, Method.BAT_MCS, 100, seed=1)


def test_cbat_budget_too_small(bridge):
    with pytest.raises(BudgetTooSmall):
        cbat_mcs(bridge, 2, RandomStream(1))


DEAD_CUT_TEXT = "nodes 4\nsource 1\nsink 4\narc 1 2 0.9\narc 1 3 0.8\narc 2 3 0.7\narc 2 4 0.0\narc 3 4 0.0\n"


def test_crude_on_failed_cut_is_zero():
    net = parse_network(DEAD_CUT_TEXT)
    result = crude_mcs(net, 1000, RandomStream(2))
    assert result.value == 0.0
    assert result.n_pass == 0
    assert result.std_error == 0.0


def test_cbat_on_failed_cut_keeps_budget():
    net = parse_network(DEAD_CUT_TEXT)
    result = cbat_mcs(net, 100, RandomStream(2))
    assert result.cut.arcs == (4, 5)
    assert result.value == 0.0
    assert result.n_sim == 100
    assert all(s.n_sim == 0 for s in result.per_stratum)


def test_crude_std_error(bridge):
    result = crude_mcs(bridge, 400, RandomStream(9))
    assert result.std_error == pytest.approx(math.sqrt(crude_variance(result.value, 400)))


def test_zero_probability_strata_get_no_trials():
    net = parse_network("nodes 4\nsource 1\nsink 4\n"
                        "arc 1 2 1.0\narc 1 3 0.8\narc 2 3 0.7\narc 2 4 0.6\narc 3 4 0.5\n")
    result = bat_mcs(net, 2, 100, RandomStream(8))
    assert [s.n_sim for s in result.per_stratum] == [0, 20, 0, 80]
    assert result.n_sim == 100


def test_skip_disconnected_keeps_trial_accounting(bridge):
    plain = bat_mcs(bridge, 2, 1000, RandomStream(6))
    skipped = bat_mcs(bridge, 2, 1000, RandomStream(6), skip_disconnected=True)
    assert [s.n_sim for s in skipped.per_stratum] == [s.n_sim for s in plain.per_stratum]
    assert skipped.per_stratum[0].n_pass == 0
    assert skipped.value == plain.value


def test_seed_out_of_range(bridge):
    with pytest.raises(InvalidParameter):
        estimate(bridge, Method.CRUDE, 10, seed=-1)


def test_method_parse():
    assert Method.parse("batmcs") is Method.BAT_MCS
    assert Method.parse("cBAT-MCS") is Method.CBAT_MCS
    assert Method.parse("crude") is Method.CRUDE
    with pytest.raises(InvalidParameter):
        Method.parse("importance")


def test_estimate_to_dict(bridge):
    data = estimate(bridge, Method.CBAT_MCS, 160, seed=2).to_dict()
    assert data["method"] == "cbat_mcs"
    assert data["cut"] == [4, 5]
    assert data["gamma"] == pytest.approx(0.005)
    assert len(data["per_stratum"]) == 3
    assert {"value", "n_sim", "n_pass", "seed", "wall_time_s"} <= set(data)
    crude = estimate(bridge, Method.CRUDE, 10, seed=2).to_dict()
    assert "gamma" not in crude and "cut" not in crude


# --- Expectations ---

@pytest.mark.parametrize("n_sim", [16, 17, 1000])
def test_expected_estimates_are_unbiased(bridge, n_sim):
    for method in Method:
        assert abs(expected_estimate(bridge, method, n_sim, beta=2) - BRIDGE_RELIABILITY) < 1e-12


def test_expected_estimates_random(random_nets):
    for net in random_nets[:10]:
        exact = exact_reliability(net)
        assert abs(expected_estimate(net, Method.CBAT_MCS, 997) - exact) < 1e-12
        assert abs(expected_estimate(net, Method.BAT_MCS, 997, beta=1) - exact) < 1e-12


@pytest.mark.slow
def test_convergence_to_exact(bridge):
    for method in Method:
        hits = sum(
            abs(estimate(bridge, method, 10 ** 6, seed=seed, beta=2).value - BRIDGE_RELIABILITY) < 0.005
            for seed in range(30)
        )
        assert hits >= 29, method


@pytest.mark.slow
def test_cbat_variance_below_crude(bridge):
    crude = [estimate(bridge, Method.CRUDE, 10 ** 4, seed=s).value for s in range(100)]
    cbat = [estimate(bridge, Method.CBAT_MCS, 10 ** 4, seed=s).value for s in range(100)]
    assert sample_variance(cbat) <= sample_variance(crude)
    assert math.isfinite(sample_variance(cbat))
