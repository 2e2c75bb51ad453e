# core/estimators.py
"""
Stochastic reliability estimators: crude Monte Carlo, BAT-MCS (strata over
the first beta arcs) and cBAT-MCS (strata over the non-zero superfamily of
the selected layer-cut), together with the budget allocation, the
normalization factor and sample-size planning they rely on.
"""
import itertools
import logging
import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import norm

from config.settings import settings
from core.enumeration import conditional_reliability, exact_reliability, superfamily, superfamily_nonzero
from core.errors import BudgetTooSmall, InvalidParameter
from core.network import Network, PartialAssignment, StateVector, assignment_probability, zero_assignment_probability
from core.streams import RandomStream, ReplayStream
from core.traversal import LayerCut, find_layer_cuts, plsa_connected, plsa_connected_batch, select_super_cut

logger = logging.getLogger(__name__)

Stream = Union[RandomStream, ReplayStream]

# Proportional quotas closer than this to an integer count as integral
INTEGRAL_TOLERANCE = 1e-9


class Method(str, Enum):
    CRUDE = "crude"
    BAT_MCS = "bat_mcs"
    CBAT_MCS = "cbat_mcs"

    @classmethod
    def parse(cls, name: str) -> "Method":
        key = name.strip().lower().replace("-", "").replace("_", "")
        for method in cls:
            if method.value.replace("_", "") == key:
                return method
        raise InvalidParameter(f"Unknown method '{name}'. Choose crude, batmcs or cbatmcs.")


@dataclass(frozen=True)
class StratumResult:
    assignment: PartialAssignment
    probability: float
    n_sim: int
    n_pass: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "arcs": list(self.assignment.arcs),
            "states": list(self.assignment.states),
            "probability": self.probability,
            "n_sim": self.n_sim,
            "n_pass": self.n_pass,
        }


@dataclass(frozen=True)
class Estimate:
    value: float
    method: Method
    n_sim: int
    n_pass: int
    per_stratum: Tuple[StratumResult, ...] = ()
    seed: Optional[int] = None
    wall_time: float = 0.0
    formula: str = "ratio"
    gamma: Optional[float] = None
    cut: Optional[LayerCut] = None
    std_error: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "method": self.method.value,
            "value": self.value,
            "n_sim": self.n_sim,
            "n_pass": self.n_pass,
            "formula": self.formula,
            "std_error": self.std_error,
            "per_stratum": [s.to_dict() for s in self.per_stratum],
            "seed": self.seed,
            "wall_time_s": self.wall_time,
        }
        if self.method is Method.CBAT_MCS:
            data["gamma"] = self.gamma
            data["cut"] = list(self.cut.arcs) if self.cut else None
        return data


@dataclass(frozen=True)
class BudgetAllocation:
    counts: Tuple[int, ...]
    exact: bool

    @property
    def total(self) -> int:
        return sum(self.counts)


# --- Sampling ---

def _template(net: Network, fixed: PartialAssignment) -> Tuple[np.ndarray, np.ndarray]:
    """Boolean state template holding the fixed arcs, and the indices of the free arcs."""
    net.check_assignment(fixed)
    fixed_states = fixed.as_dict()
    template = np.zeros(net.m, dtype=bool)
    for arc_id, state in fixed_states.items():
        template[arc_id - 1] = bool(state)
    free_idx = np.array([a.arc_id - 1 for a in net.arcs if a.arc_id not in fixed_states], dtype=np.intp)
    return template, free_idx


def sample_state(net: Network, fixed: PartialAssignment, stream: Stream) -> StateVector:
    """One trial: free arcs drawn in ascending arc id order, x = 1 iff rho <= Pr(a)."""
    template, free_idx = _template(net, fixed)
    draws = stream.uniform(free_idx.size)
    state = template.copy()
    state[free_idx] = draws <= net.probability_array[free_idx]
    return tuple(int(bit) for bit in state)


def _count_passes(net: Network, fixed: PartialAssignment, n_trials: int, stream: Stream,
                  skip_disconnected: bool = False) -> int:
    """Runs n_trials conditional trials in blocks; draws are trial-major, then by free arc."""
    template, free_idx = _template(net, fixed)

    if skip_disconnected:
        best_case = template.copy()
        best_case[free_idx] = True
        if not plsa_connected(net, best_case.tolist()):
            return 0

    p = net.probability_array[free_idx]
    passes = 0
    remaining = n_trials
    while remaining > 0:
        k = min(settings.TRIAL_BLOCK_SIZE, remaining)
        draws = stream.uniform((k, free_idx.size))
        states = np.broadcast_to(template, (k, net.m)).copy()
        states[:, free_idx] = draws <= p
        passes += int(np.count_nonzero(plsa_connected_batch(net, states)))
        remaining -= k
    return passes


# --- Budget allocation ---

def allocate_budget(stratum_probs: Sequence[float], n_sim: int) -> BudgetAllocation:
    """
    Splits n_sim trials proportionally to the stratum probabilities.
    Integral quotas are used as is; otherwise counts are floored, zeros are
    raised to 1, and what is left goes to the largest fractional remainders
    (lower index first). If raising overshoots, trials are taken back one at a
    time from the smallest quota that still has more than one.
    """
    probs = [float(p) for p in stratum_probs]
    if not probs:
        raise InvalidParameter("Need at least one stratum.")
    if any(not p > 0 for p in probs):
        raise InvalidParameter("Stratum probabilities must be positive.")
    if n_sim < len(probs):
        raise BudgetTooSmall(f"{n_sim} trial(s) cannot cover {len(probs)} strata.")

    total = math.fsum(probs)
    quotas = [n_sim * p / total for p in probs]

    rounded = [round(q) for q in quotas]
    if (sum(rounded) == n_sim and min(rounded) >= 1
            and all(abs(q - r) <= INTEGRAL_TOLERANCE * max(1.0, q) for q, r in zip(quotas, rounded))):
        return BudgetAllocation(tuple(rounded), True)

    floors = [math.floor(q) for q in quotas]
    raised = [c == 0 for c in floors]
    counts = [max(1, c) for c in floors]
    remaining = n_sim - sum(counts)

    if remaining > 0:
        eligible = [i for i in range(len(counts)) if not raised[i]] or list(range(len(counts)))
        order = sorted(eligible, key=lambda i: (-(quotas[i] - floors[i]), i))
        for i in itertools.islice(itertools.cycle(order), remaining):
            counts[i] += 1

    while remaining < 0:
        j = min((i for i in range(len(counts)) if counts[i] > 1), key=lambda i: (quotas[i], -i))
        counts[j] -= 1
        remaining += 1

    return BudgetAllocation(tuple(counts), False)


def integral_budget(stratum_probs: Sequence[float], minimum: int, search_limit: int = 100_000) -> Optional[int]:
    """Smallest n_sim >= minimum whose proportional allocation is integral, if one exists nearby."""
    start = max(int(minimum), len(stratum_probs))
    for n_sim in range(start, start + search_limit):
        if allocate_budget(stratum_probs, n_sim).exact:
            return n_sim
    return None


def stratum_probabilities(net: Network, method: "Method", beta: Optional[int] = None) -> List[float]:
    """Positive stratum probabilities the stratified estimators allocate over; empty for crude MCS."""
    if method is Method.CRUDE:
        return []
    if method is Method.BAT_MCS:
        if beta is None or not 1 <= beta < net.m:
            raise InvalidParameter(f"beta must satisfy 1 <= beta < m = {net.m}.")
        members = superfamily(range(1, beta + 1)).members
    else:
        members = superfamily_nonzero(select_super_cut(net, find_layer_cuts(net)).arcs).members
    probs = (assignment_probability(net, x) for x in members)
    return [p for p in probs if p > 0]


def round_up_budget(net: Network, method: Union["Method", str], n_sim: int, beta: Optional[int] = None) -> int:
    """Raises n_sim to the next budget whose allocation is integral; unchanged if none is found."""
    method = Method.parse(method) if isinstance(method, str) else method
    probs = stratum_probabilities(net, method, beta)
    if not probs:
        return n_sim
    budget = integral_budget(probs, n_sim)
    if budget is None:
        logger.warning(f"No integral budget within reach of {n_sim} for {method.value}; keeping it.")
        return n_sim
    if budget != n_sim:
        logger.info(f"Raised {method.value} budget from {n_sim} to {budget} for an integral allocation.")
    return budget


# --- Estimator formulas ---

def weighted_estimate(strata: Sequence[StratumResult]) -> float:
    """Sum of Pr(X) * N_pass(X) / N_sim(X); strata without trials contribute nothing."""
    return math.fsum(s.probability * s.n_pass / s.n_sim for s in strata if s.n_sim > 0)


def gamma_estimate(gamma: float, n_pass: int) -> float:
    return gamma * n_pass


def crude_variance(reliability: float, n_sim: int) -> float:
    return reliability * (1.0 - reliability) / n_sim


def _stratified_std_error(strata: Sequence[StratumResult]) -> float:
    variance = math.fsum(
        s.probability ** 2 * (s.n_pass / s.n_sim) * (1.0 - s.n_pass / s.n_sim) / s.n_sim
        for s in strata if s.n_sim > 0
    )
    return math.sqrt(variance)


def normalization_factor(net: Network, cut: LayerCut, n_sim: int) -> float:
    """gamma = (1 - Pr(0(C))) / n_sim, cross-checked against the sum over the non-zero superfamily."""
    if n_sim < 1:
        raise InvalidParameter("n_sim must be at least 1.")
    from_zero = 1.0 - zero_assignment_probability(net, cut.arcs)
    from_family = math.fsum(assignment_probability(net, x) for x in superfamily_nonzero(cut.arcs).members)
    if abs(from_zero - from_family) > 1e-12:
        logger.warning(f"Normalization mass disagrees: {from_zero!r} vs {from_family!r} for cut {cut.arcs}.")
    return from_zero / n_sim


def variance_scale(net: Network, cut: LayerCut) -> float:
    """[sum of Pr(X) over the non-zero superfamily]^2, the variance multiplier of cBAT-MCS."""
    return (1.0 - zero_assignment_probability(net, cut.arcs)) ** 2


def required_sample_size(reliability_guess: float, epsilon: float, alpha: float) -> int:
    """Trials needed for relative error epsilon at confidence 1-alpha: z^2 (1-R) / (eps^2 R)."""
    if not 0.0 < reliability_guess <= 1.0:
        raise InvalidParameter(f"Reliability guess must be in (0, 1], got {reliability_guess}.")
    if not epsilon > 0.0:
        raise InvalidParameter(f"Relative error must be positive, got {epsilon}.")
    if not 0.0 < alpha < 1.0:
        raise InvalidParameter(f"Significance must be in (0, 1), got {alpha}.")
    z = norm.ppf(1.0 - alpha / 2.0)
    return math.ceil(z * z * (1.0 - reliability_guess) / (epsilon * epsilon * reliability_guess))


# --- Estimators ---

def crude_mcs(net: Network, n_sim: int, stream: Stream) -> Estimate:
    if n_sim < 1:
        raise InvalidParameter("n_sim must be at least 1.")
    start = time.perf_counter()
    n_pass = _count_passes(net, PartialAssignment(), n_sim, stream.spawn(0))
    value = n_pass / n_sim
    return Estimate(
        value=value,
        method=Method.CRUDE,
        n_sim=n_sim,
        n_pass=n_pass,
        seed=stream.seed,
        wall_time=time.perf_counter() - start,
        formula="ratio",
        std_error=math.sqrt(crude_variance(value, n_sim)),
    )


def _run_strata(net: Network, members: Sequence[PartialAssignment], n_sim: int, stream: Stream,
                skip_disconnected: bool) -> Tuple[List[StratumResult], BudgetAllocation]:
    """Allocates n_sim over the positive-probability members and samples each on sub-stream i."""
    probs = [assignment_probability(net, x) for x in members]
    positive = [i for i, p in enumerate(probs) if p > 0]
    counts = [0] * len(members)
    allocation = BudgetAllocation((), True)
    if positive:
        allocation = allocate_budget([probs[i] for i in positive], n_sim)
        for i, count in zip(positive, allocation.counts):
            counts[i] = count
    else:
        logger.warning(f"Every stratum has probability 0; none of the {n_sim} trials were run.")

    results = []
    for i, (member, prob, count) in enumerate(zip(members, probs, counts)):
        n_pass = _count_passes(net, member, count, stream.spawn(i), skip_disconnected) if count else 0
        results.append(StratumResult(member, prob, count, n_pass))
    return results, allocation


def bat_mcs(net: Network, beta: int, n_sim: int, stream: Stream, skip_disconnected: bool = False) -> Estimate:
    """Stratifies on every assignment of the first beta arcs and combines the stratum ratios by weight."""
    if not 1 <= beta < net.m:
        raise InvalidParameter(f"beta must satisfy 1 <= beta < m = {net.m}, got {beta}.")
    if n_sim < 2 ** beta:
        raise BudgetTooSmall(f"BAT-MCS with beta={beta} needs at least {2 ** beta} trials, got {n_sim}.")

    start = time.perf_counter()
    family = superfamily(range(1, beta + 1))
    strata, _ = _run_strata(net, family.members, n_sim, stream, skip_disconnected)
    return Estimate(
        value=min(1.0, weighted_estimate(strata)),
        method=Method.BAT_MCS,
        n_sim=n_sim,
        n_pass=sum(s.n_pass for s in strata),
        per_stratum=tuple(strata),
        seed=stream.seed,
        wall_time=time.perf_counter() - start,
        formula="weighted",
        std_error=_stratified_std_error(strata),
    )


def cbat_mcs(net: Network, n_sim: int, stream: Stream, skip_disconnected: bool = False) -> Estimate:
    """
    Stratifies on the non-zero superfamily of the maximal-probability
    minimal-size layer-cut. With an integral allocation the estimate is
    gamma * N_pass; when counts had to be rounded the weighted per-stratum form is
    used instead, since gamma * N_pass is only unbiased for exact proportions.
    """
    start = time.perf_counter()
    cut = select_super_cut(net, find_layer_cuts(net))
    family = superfamily_nonzero(cut.arcs)
    if n_sim < len(family):
        raise BudgetTooSmall(f"cBAT-MCS on a {len(cut)}-arc cut needs at least {len(family)} trials, got {n_sim}.")

    gamma = normalization_factor(net, cut, n_sim)
    mass = 1.0 - zero_assignment_probability(net, cut.arcs)
    strata, allocation = _run_strata(net, family.members, n_sim, stream, skip_disconnected)
    n_pass = sum(s.n_pass for s in strata)

    if allocation.exact:
        # every trial passing recovers the full mass, not a rounded multiple of gamma
        value = mass if n_pass == n_sim else gamma_estimate(gamma, n_pass)
        formula = "gamma"
    else:
        value = weighted_estimate(strata)
        formula = "weighted"
    logger.debug(f"cBAT-MCS on cut {cut.arcs}: gamma={gamma!r}, allocation={allocation.counts}, formula={formula}.")

    return Estimate(
        value=min(1.0, max(0.0, value)),
        method=Method.CBAT_MCS,
        n_sim=n_sim,
        n_pass=n_pass,
        per_stratum=tuple(strata),
        seed=stream.seed,
        wall_time=time.perf_counter() - start,
        formula=formula,
        gamma=gamma,
        cut=cut,
        std_error=_stratified_std_error(strata),
    )


def estimate(net: Network, method: Union[Method, str], n_sim: int, seed: int,
             beta: Optional[int] = None, skip_disconnected: bool = False) -> Estimate:
    """Runs one estimator on a fresh stream for `seed`."""
    method = Method.parse(method) if isinstance(method, str) else method
    stream = RandomStream(seed)
    if method is Method.CRUDE:
        return crude_mcs(net, n_sim, stream)
    if method is Method.BAT_MCS:
        if beta is None:
            raise InvalidParameter("BAT-MCS needs beta.")
        return bat_mcs(net, beta, n_sim, stream, skip_disconnected)
    return cbat_mcs(net, n_sim, stream, skip_disconnected)


def expected_estimate(net: Network, method: Union[Method, str], n_sim: int, beta: Optional[int] = None) -> float:
    """
    Exact expectation of an estimator: each stratum's pass ratio is replaced by
    its conditional reliability. Equals exact_reliability for unbiased set-ups.
    """
    method = Method.parse(method) if isinstance(method, str) else method
    if method is Method.CRUDE:
        return exact_reliability(net)

    if method is Method.BAT_MCS:
        if beta is None or not 1 <= beta < net.m:
            raise InvalidParameter(f"beta must satisfy 1 <= beta < m = {net.m}.")
        members = superfamily(range(1, beta + 1)).members
        cut = None
    else:
        cut = select_super_cut(net, find_layer_cuts(net))
        members = superfamily_nonzero(cut.arcs).members

    probs = [assignment_probability(net, x) for x in members]
    positive = [i for i, p in enumerate(probs) if p > 0]
    if not positive:
        return 0.0
    allocation = allocate_budget([probs[i] for i in positive], n_sim)
    conditionals = [conditional_reliability(net, members[i]) for i in positive]

    if cut is not None and allocation.exact:
        gamma = normalization_factor(net, cut, n_sim)
        return gamma * math.fsum(count * r for count, r in zip(allocation.counts, conditionals))
    return math.fsum(probs[i] * r for i, r in zip(positive, conditionals))
