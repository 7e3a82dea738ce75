"""Randomized check that no sampled evolution beats any bound."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bc import bc_table
from .bounds import BOUND_LABELS, bound_report
from .core import QuantumState, energy_stats, spectral_decompose
from .evolution import default_t_max, overlap_trajectory

__all__ = [
    "RunConfig",
    "Violation",
    "VerificationReport",
    "random_system",
    "saturating_state",
    "verify_random",
    "worker_count",
]


@dataclass(frozen=True)
class RunConfig:
    """Parameters of a verification run.

    ``t_max_policy`` picks the sampled time window: ``"horizon"`` spans
    1.25 times the largest bound at theta = pi/2 (no bound can bind later),
    ``"recurrence"`` uses the evolution module's default window.
    """

    seed: int = 42
    trials: int = 100
    dim_max: int = 8
    samples: int = 64
    dim_min: int = 2
    t_max_policy: str = "horizon"
    tolerance: float = 1e-9
    saturating_trials: int = 0

    def __post_init__(self):
        if self.trials < 0 or self.samples <= 0 or self.saturating_trials < 0:
            raise ValueError("trial and sample counts must be positive")
        if not 2 <= self.dim_min <= self.dim_max:
            raise ValueError("need 2 <= dim_min <= dim_max")
        if self.t_max_policy not in ("horizon", "recurrence"):
            raise ValueError(f"unknown t_max_policy {self.t_max_policy!r}")


@dataclass(frozen=True)
class Violation:
    seed: int
    trial: int
    dimension: int
    time: float
    theta: float
    bound_label: str
    deficit: float


@dataclass
class VerificationReport:
    trials: int
    dimensions_tested: list
    samples_per_trial: int
    violations: list
    worst_saturation: float
    worst_saturation_by_bound: dict
    saturating_trials: int = 0
    saturation_max_deviation: float = 0.0
    elapsed: float = 0.0

    def to_json(self, include_timing: bool = False) -> str:
        """Deterministic serialization; wall time is left out unless requested."""
        doc = asdict(self)
        if not include_timing:
            del doc["elapsed"]
        for key, val in list(doc.items()):
            if isinstance(val, float) and math.isinf(val):
                doc[key] = None
        doc["worst_saturation_by_bound"] = {
            k: (None if math.isinf(v) else v) for k, v in doc["worst_saturation_by_bound"].items()
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def worker_count() -> int:
    env = os.environ.get("QSL_THREADS")
    if env is None:
        return os.cpu_count() or 1
    n = int(env)
    if n <= 0:
        raise ValueError("QSL_THREADS must be a positive integer")
    return n


def random_system(rng: np.random.Generator, dimension: int):
    """Gaussian Hermitian matrix and a Gaussian random normalized state."""
    a = rng.standard_normal((dimension, dimension)) + 1j * rng.standard_normal((dimension, dimension))
    system = spectral_decompose(0.5 * (a + a.conj().T))
    v = rng.standard_normal(dimension) + 1j * rng.standard_normal(dimension)
    return system, QuantumState.from_vector(v)


def saturating_state(system) -> QuantumState:
    """(|E_min> + |E_max>)/sqrt 2, the state of maximal energy spread."""
    v = system.eigenvectors[:, 0] + system.eigenvectors[:, -1]
    return QuantumState.from_vector(v)


def _horizon(stats, table) -> float:
    report = bound_report(stats, math.pi / 2, table(math.pi / 2))
    return 1.25 * max(report.entries().values())


@dataclass
class _TrialResult:
    dimension: int
    violations: list = field(default_factory=list)
    worst: dict = field(default_factory=dict)
    deviation: float = 0.0


def _check_samples(trial_id, seed, system, state, times, tol, table, result):
    stats = energy_stats(state, system)
    s = overlap_trajectory(system, state, times)
    thetas = np.arccos(np.clip(np.abs(s), 0.0, 1.0))
    for t, theta in zip(times, thetas):
        t, theta = float(t), float(theta)
        report = bound_report(stats, theta, table(theta))
        for label, bound in report.entries().items():
            if bound > 0:
                result.worst[label] = min(result.worst.get(label, math.inf), t / bound)
            if t < bound - tol * (1.0 + t):
                result.violations.append(Violation(
                    seed=seed, trial=trial_id, dimension=system.dimension,
                    time=t, theta=theta, bound_label=label, deficit=bound - t,
                ))
    return stats


def _run_trial(cfg: RunConfig, index: int, table) -> _TrialResult:
    rng = np.random.default_rng([cfg.seed, index])
    dim = int(rng.integers(cfg.dim_min, cfg.dim_max + 1))
    system, state = random_system(rng, dim)
    stats = energy_stats(state, system)
    if cfg.t_max_policy == "horizon":
        t_end = _horizon(stats, table)
    else:
        t_end = default_t_max(system)
    times = t_end * np.arange(1, cfg.samples + 1) / cfg.samples
    result = _TrialResult(dimension=dim)
    _check_samples(index, cfg.seed, system, state, times, cfg.tolerance, table, result)
    return result


def _run_saturating(cfg: RunConfig, index: int, table) -> _TrialResult:
    rng = np.random.default_rng([cfg.seed, index, 1])
    dim = int(rng.integers(cfg.dim_min, cfg.dim_max + 1))
    system, _ = random_system(rng, dim)
    state = saturating_state(system)
    stats = energy_stats(state, system)
    # theta(t) = spread * t exactly up to the orthogonalization time
    times = 0.5 * math.pi / stats.spread * np.arange(1, cfg.samples + 1) / cfg.samples
    result = _TrialResult(dimension=dim)
    _check_samples(-1 - index, cfg.seed, system, state, times, cfg.tolerance, table, result)
    s = overlap_trajectory(system, state, times)
    thetas = np.arccos(np.clip(np.abs(s), 0.0, 1.0))
    ratios = times * stats.spread / thetas
    result.deviation = float(np.max(np.abs(ratios - 1.0)))
    return result


def verify_random(config: RunConfig, threads: int | None = None) -> VerificationReport:
    """Sample random systems and check every bound along their trajectories.

    Each trial's generator is seeded from ``(seed, trial index)``, and
    results are reduced in trial order, so the report does not depend
    on the number of worker threads.
    """
    start = time.perf_counter()
    table = bc_table()
    workers = threads or worker_count()
    jobs = [(_run_trial, i) for i in range(config.trials)]
    jobs += [(_run_saturating, j) for j in range(config.saturating_trials)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: job[0](config, job[1], table), jobs))
    else:
        results = [fn(config, i, table) for fn, i in jobs]

    violations, worst = [], {label: math.inf for label in BOUND_LABELS}
    deviation = 0.0
    for res in results:
        violations.extend(asdict(v) for v in res.violations)
        for label, val in res.worst.items():
            worst[label] = min(worst[label], val)
        deviation = max(deviation, res.deviation)
    dims = sorted({res.dimension for res in results[: config.trials]})
    return VerificationReport(
        trials=config.trials,
        dimensions_tested=dims,
        samples_per_trial=config.samples,
        violations=violations,
        worst_saturation=min(worst.values()),
        worst_saturation_by_bound=worst,
        saturating_trials=config.saturating_trials,
        saturation_max_deviation=deviation,
        elapsed=time.perf_counter() - start,
    )
