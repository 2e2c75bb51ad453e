# services/experiment_runner.py
"""
Repeated-run experiment harness: every (network, method, tier) combination is
run n_run times with independently derived seeds, then summarised into mean,
sample variance, mean absolute error against the exact oracle and wall-time
statistics, plus Welch p-values between every pair of methods.
"""
import asyncio
import functools
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from core.enumeration import exact_reliability
from core.errors import ConfigError, ReliacutError
from core.estimators import Estimate, Method, estimate
from core.network import Network
from services.data_manager import DataManager
from services.resource_monitor import ResourceMonitor
from utils.random_networks import generate_random_network
from utils.statistics import round_significant, sample_mean, sample_variance, welch_p_value

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("csv", "json")
CONFIG_KEYS = {"networks", "methods", "nsim", "beta", "nrun", "seed", "prob", "timing", "workers", "out", "format"}


# --- Configuration ---

@dataclass(frozen=True)
class NetworkSource:
    name: str
    path: Optional[Path] = None
    random: Optional[Tuple[Tuple[str, Any], ...]] = None

    @property
    def random_params(self) -> Dict[str, Any]:
        return dict(self.random or ())


@dataclass(frozen=True)
class ExperimentConfig:
    networks: Tuple[NetworkSource, ...]
    methods: Tuple[Method, ...]
    n_sims: Tuple[int, ...]
    beta: int = 2
    n_run: int = 30
    seed: int = settings.DEFAULT_SEED
    prob: Optional[float] = None
    timing: bool = True
    workers: int = settings.BENCH_WORKERS
    output: Optional[Path] = None
    format: str = "csv"

    def __post_init__(self):
        if not self.networks:
            raise ConfigError("The experiment needs at least one network.")
        if not self.methods:
            raise ConfigError("The experiment needs at least one method.")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("Methods must not repeat.")
        if not self.n_sims or any(not isinstance(n, int) or n < 1 for n in self.n_sims):
            raise ConfigError(f"Every nsim tier must be a positive integer, got {list(self.n_sims)}.")
        if self.n_run < 2:
            raise ConfigError(f"nrun must be at least 2 so the variance is defined, got {self.n_run}.")
        if self.beta < 1:
            raise ConfigError(f"beta must be at least 1, got {self.beta}.")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}.")
        if self.prob is not None and not 0.0 <= self.prob <= 1.0:
            raise ConfigError(f"prob must be in [0, 1], got {self.prob}.")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1.")
        if self.format not in REPORT_FORMATS:
            raise ConfigError(f"format must be one of {REPORT_FORMATS}, got '{self.format}'.")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base_dir: Path = Path(".")) -> "ExperimentConfig":
        """Builds a config from the bench JSON schema; relative paths resolve against base_dir."""
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            logger.warning(f"Ignoring unknown config key(s): {sorted(unknown)}")

        try:
            sources = tuple(_network_source(entry, base_dir) for entry in data.get("networks", []))
            methods = tuple(Method.parse(m) for m in data.get("methods", []))
            n_sims = data.get("nsim", [])
            n_sims = tuple(n_sims if isinstance(n_sims, list) else [n_sims])
            output = data.get("out")
            return cls(
                networks=sources,
                methods=methods,
                n_sims=n_sims,
                beta=int(data.get("beta", 2)),
                n_run=int(data.get("nrun", 30)),
                seed=int(data.get("seed", settings.DEFAULT_SEED)),
                prob=None if data.get("prob") is None else float(data["prob"]),
                timing=bool(data.get("timing", True)),
                workers=int(data.get("workers", settings.BENCH_WORKERS)),
                output=None if output is None else base_dir / output,
                format=str(data.get("format", "csv")),
            )
        except ReliacutError as e:
            raise ConfigError(str(e)) from e
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Malformed experiment config: {e}") from e


def _network_source(entry: Any, base_dir: Path) -> NetworkSource:
    if isinstance(entry, str):
        path = Path(entry)
        return NetworkSource(name=path.name, path=path if path.is_absolute() else base_dir / path)
    if isinstance(entry, dict) and isinstance(entry.get("random"), dict):
        params = entry["random"]
        missing = {"nodes", "arcs", "prob", "seed"} - set(params)
        if missing:
            raise ConfigError(f"Random network entry is missing {sorted(missing)}.")
        prob = params["prob"]
        prob = tuple(prob) if isinstance(prob, list) else float(prob)
        frozen = (("nodes", int(params["nodes"])), ("arcs", int(params["arcs"])),
                  ("prob", prob), ("seed", int(params["seed"])))
        name = f"random-n{params['nodes']}-m{params['arcs']}-s{params['seed']}"
        return NetworkSource(name=name, random=frozen)
    raise ConfigError(f"Network entries must be paths or {{'random': {{...}}}} objects, got {entry!r}.")


# --- Report model ---

@dataclass
class NetworkInfo:
    name: str
    nodes: int
    arcs: int
    exact: Optional[float]


@dataclass
class ReportRow:
    network: str
    method: str
    tier: int
    n_sim: int
    n_run: int
    mean: float
    variance: float
    mae: Optional[float]
    mean_time_s: Optional[float]
    min_time_s: Optional[float]
    max_time_s: Optional[float]
    estimates: List[float]
    times_s: Optional[List[float]]


@dataclass
class Comparison:
    network: str
    tier: int
    method_a: str
    method_b: str
    p_value: float
    p_value_time: Optional[float]


@dataclass
class RunReport:
    seed: int
    n_run: int
    networks: List[NetworkInfo] = field(default_factory=list)
    rows: List[ReportRow] = field(default_factory=list)
    comparisons: List[Comparison] = field(default_factory=list)
    resources: Optional[Dict[str, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunReport":
        return cls(
            seed=data["seed"],
            n_run=data["n_run"],
            networks=[NetworkInfo(**n) for n in data.get("networks", [])],
            rows=[ReportRow(**r) for r in data.get("rows", [])],
            comparisons=[Comparison(**c) for c in data.get("comparisons", [])],
            resources=data.get("resources"),
        )


def derive_seed(base_seed: int, network_index: int, method_index: int, tier_index: int, run_index: int) -> int:
    """Independent 64-bit run seed keyed by the run's coordinates in the experiment."""
    sequence = np.random.SeedSequence(base_seed, spawn_key=(network_index, method_index, tier_index, run_index))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def summarize_runs(network: str, method: Method, tier: int, n_sim: int, runs: Sequence[Estimate],
                   exact: Optional[float], timing: bool) -> ReportRow:
    """Statistics are computed from the rounded per-run values, so they recompute from the report."""
    digits = settings.FLOAT_DIGITS
    values = [round_significant(e.value, digits) for e in runs]
    mae = None
    if exact is not None:
        mae = round_significant(sample_mean([abs(exact - v) for v in values]), digits)

    times = [round_significant(e.wall_time, digits) for e in runs] if timing else None
    return ReportRow(
        network=network,
        method=method.value,
        tier=tier,
        n_sim=n_sim,
        n_run=len(runs),
        mean=round_significant(sample_mean(values), digits),
        variance=round_significant(sample_variance(values), digits),
        mae=mae,
        mean_time_s=round_significant(sample_mean(times), digits) if times else None,
        min_time_s=min(times) if times else None,
        max_time_s=max(times) if times else None,
        estimates=values,
        times_s=times,
    )


# --- Runner ---

class ExperimentRunner:
    def __init__(self, data_manager: DataManager, resource_monitor: Optional[ResourceMonitor] = None):
        self.data_manager = data_manager
        self.resource_monitor = resource_monitor
        self.logger = logging.getLogger(__name__)

    async def _load_network(self, source: NetworkSource, prob: Optional[float]) -> Network:
        if source.path is not None:
            net = await self.data_manager.load_network(source.path)
        else:
            params = source.random_params
            net = generate_random_network(params["nodes"], params["arcs"], params["prob"], params["seed"])
        return net.with_uniform_probability(prob) if prob is not None else net

    @staticmethod
    def _exact_or_none(net: Network) -> Optional[float]:
        if net.m > settings.ENUMERATION_LIMIT:
            return None
        return exact_reliability(net)

    async def run(self, cfg: ExperimentConfig) -> RunReport:
        # Every network is loaded up front so bad input fails before any run starts.
        networks = [await self._load_network(source, cfg.prob) for source in cfg.networks]

        report = RunReport(seed=cfg.seed, n_run=cfg.n_run)
        canonical = list(Method)
        digits = settings.FLOAT_DIGITS
        loop = asyncio.get_running_loop()

        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for ni, (source, net) in enumerate(zip(cfg.networks, networks)):
                exact = round_significant(await loop.run_in_executor(pool, self._exact_or_none, net), digits)
                report.networks.append(NetworkInfo(source.name, net.node_count, net.m, exact))
                self.logger.info(f"Network {source.name}: n={net.node_count}, m={net.m}, exact={exact}")

                tier_rows: Dict[int, Dict[Method, ReportRow]] = {}
                for method in cfg.methods:
                    mi = canonical.index(method)
                    for ti, n_sim in enumerate(cfg.n_sims):
                        tier = ti + 1
                        jobs = [
                            loop.run_in_executor(pool, functools.partial(
                                estimate, net, method, n_sim, derive_seed(cfg.seed, ni, mi, ti, ri), cfg.beta))
                            for ri in range(cfg.n_run)
                        ]
                        try:
                            runs = await asyncio.gather(*jobs)
                        except ReliacutError as e:
                            raise type(e)(f"{source.name} / {method.value} / tier {tier}: {e}") from e

                        row = summarize_runs(source.name, method, tier, n_sim, runs, exact, cfg.timing)
                        report.rows.append(row)
                        tier_rows.setdefault(tier, {})[method] = row
                        self.logger.info(f"  {method.value} tier {tier} (n_sim={n_sim}): mean={row.mean}, var={row.variance}")

                for tier in sorted(tier_rows):
                    report.comparisons.extend(self._compare(source.name, tier, tier_rows[tier]))

                if self.resource_monitor:
                    usage = self.resource_monitor.sample()
                    self.logger.info(f"Resources after {source.name}: {usage['memory_mb']:.1f} MB RSS, "
                                     f"{usage['cpu_percent']:.0f}% CPU, {usage['threads']} threads")

        if cfg.timing and self.resource_monitor:
            report.resources = {"peak_memory_mb": round_significant(self.resource_monitor.peak_memory_mb, digits)}
        return report

    @staticmethod
    def _compare(network: str, tier: int, rows: Mapping[Method, ReportRow]) -> List[Comparison]:
        digits = settings.FLOAT_DIGITS
        comparisons = []
        for (a, row_a), (b, row_b) in itertools.combinations(rows.items(), 2):
            p_time = None
            if row_a.times_s and row_b.times_s:
                p_time = round_significant(welch_p_value(row_a.times_s, row_b.times_s), digits)
            comparisons.append(Comparison(
                network=network,
                tier=tier,
                method_a=a.value,
                method_b=b.value,
                p_value=round_significant(welch_p_value(row_a.estimates, row_b.estimates), digits),
                p_value_time=p_time,
            ))
        return comparisons


def run_experiment(cfg: ExperimentConfig, data_manager: Optional[DataManager] = None,
                   resource_monitor: Optional[ResourceMonitor] = None) -> RunReport:
    """Synchronous entry point for callers without an event loop."""
    runner = ExperimentRunner(data_manager or DataManager(base_path=Path.cwd()), resource_monitor)
    return asyncio.run(runner.run(cfg))
