"""Monte Carlo harness: independent blocks, block-end estimates, empirical distortion."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from scipy.stats import binomtest

from .analysis import DistortionFormulaReport, min_distortion
from .channel import BlockTrajectory, run_block, state_from_word, trial_rng, trial_seed
from .core import BlockConfig
from .estimator import estimate
from .policy import Policy, first_hit


@dataclass(frozen=True)
class ClassStat:
    count: int
    probability: float
    mean_size: float
    min_size: int
    max_size: int


@dataclass
class ClassTally:
    """Integer accumulator of outcome classes; merging is exact and order-free."""

    counts: dict = field(default_factory=dict)
    size_sums: dict = field(default_factory=dict)
    size_min: dict = field(default_factory=dict)
    size_max: dict = field(default_factory=dict)

    def add(self, k: int | None, size: int) -> None:
        self.counts[k] = self.counts.get(k, 0) + 1
        self.size_sums[k] = self.size_sums.get(k, 0) + size
        self.size_min[k] = min(self.size_min.get(k, size), size)
        self.size_max[k] = max(self.size_max.get(k, size), size)

    def merge(self, other: ClassTally) -> None:
        for k, c in other.counts.items():
            self.counts[k] = self.counts.get(k, 0) + c
            self.size_sums[k] = self.size_sums.get(k, 0) + other.size_sums[k]
            self.size_min[k] = min(self.size_min.get(k, other.size_min[k]), other.size_min[k])
            self.size_max[k] = max(self.size_max.get(k, other.size_max[k]), other.size_max[k])

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def histogram(self) -> dict[int | None, ClassStat]:
        n = self.total
        return {
            k: ClassStat(
                count=c,
                probability=c / n,
                mean_size=self.size_sums[k] / c,
                min_size=self.size_min[k],
                max_size=self.size_max[k],
            )
            for k, c in sorted(self.counts.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))
        }


def summarize_classes(logs: Iterable[BlockTrajectory]) -> dict[int | None, ClassStat]:
    """Empirical first-hit class frequencies and final ambiguity sizes."""
    tally = ClassTally()
    for traj in logs:
        tally.add(first_hit(traj.outputs), len(traj.ambiguity))
    return tally.histogram()


@dataclass(frozen=True)
class SimulationReport:
    cfg: BlockConfig
    policy: str
    mode: str
    blocks: int
    seed: int
    errors: int
    mean_distortion: float
    std_error: float
    binomial_interval: tuple[float, float]
    class_histogram: dict
    theoretical: DistortionFormulaReport

    def first_hit_probabilities(self) -> dict[int, float]:
        return {k: s.probability for k, s in self.class_histogram.items() if k is not None}

    def within(self, target: float, z: float = 3.0) -> bool:
        """``|mean - target| <= z * std_error``; at zero spread the mean must be exact."""
        return abs(self.mean_distortion - target) <= z * self.std_error


def _run_trials(cfg: BlockConfig, policy: Policy, seed: int, start: int, stop: int) -> tuple[int, ClassTally]:
    errors = 0
    tally = ClassTally()
    randomized = policy.stochastic
    for i in range(start, stop):
        word = trial_seed(seed, i)
        state = state_from_word(cfg, word)
        traj = run_block(cfg, policy, state, trial_rng(word) if randomized else None)
        # Hamming distortion is 2 exactly when the estimate misses
        if estimate(traj.ambiguity).s_hat != state:
            errors += 1
        tally.add(first_hit(traj.outputs), len(traj.ambiguity))
    return errors, tally


def run_experiment(
    cfg: BlockConfig,
    policy: Policy,
    blocks: int,
    seed: int = 0,
    workers: int = 1,
    theoretical: DistortionFormulaReport | None = None,
) -> SimulationReport:
    """Simulate ``blocks`` i.i.d. blocks and average the block-end Hamming distortion.

    Trial ``i`` depends only on ``(seed, i)``, so the report is identical for
    any number of workers.
    """
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    if workers > 1 and blocks >= 2 * workers:
        bounds = [blocks * w // workers for w in range(workers + 1)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(
                _run_trials,
                [cfg] * workers, [policy] * workers, [seed] * workers, bounds[:-1], bounds[1:],
            ))
    else:
        parts = [_run_trials(cfg, policy, seed, 0, blocks)]
    errors = sum(e for e, _ in parts)
    tally = ClassTally()
    for _, t in parts:
        tally.merge(t)

    # per-block distortion is 0 or 2, so moments follow from the error count
    mean = 2 * errors / blocks
    var = (4 * errors - 4 * errors * errors / blocks) / (blocks - 1) if blocks > 1 else 0.0
    ci = binomtest(errors, blocks).proportion_ci(method="exact")
    return SimulationReport(
        cfg=cfg,
        policy=policy.label,
        mode=policy.mode.value,
        blocks=blocks,
        seed=seed,
        errors=errors,
        mean_distortion=mean,
        std_error=math.sqrt(max(var, 0.0) / blocks),
        binomial_interval=(2 * ci.low, 2 * ci.high),
        class_histogram=tally.histogram(),
        theoretical=theoretical or min_distortion(cfg),
    )


def exact_mean(report: SimulationReport) -> Fraction:
    return Fraction(2 * report.errors, report.blocks)
