"""Closed-form minimum distortion under a peak probe weight, and what it predicts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import BlockConfig, positive_part
from .policy import ProbeSchedule, compute_schedule, optimal_policy


@dataclass(frozen=True)
class DistortionFormulaReport:
    cfg: BlockConfig
    d_min: Fraction
    schedule: ProbeSchedule
    terms: tuple[Fraction, ...]
    residual: Fraction
    zero_distortion: bool
    feasible_value: Fraction
    """Exact distortion of the canonical strategy built on the integer schedule."""

    @property
    def feasible_matches(self) -> bool:
        return self.feasible_value == self.d_min


def formula_value(cfg: BlockConfig, schedule: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], Fraction]:
    """Per-use terms ``2 [c_j - 2^(L-j)]^+ / M`` and the residual ``2 [M - sum c - 1]^+ / M``."""
    m, l = cfg.m, cfg.l  # noqa: E741
    terms = tuple(
        2 * positive_part(Fraction(c) - 2 ** (l - j)) / m for j, c in enumerate(schedule, 1)
    )
    residual = 2 * positive_part(m - sum(map(Fraction, schedule)) - 1) / m
    return terms, residual


def min_distortion(cfg: BlockConfig) -> DistortionFormulaReport:
    from .oracle import evaluate_policy_exact

    schedule = compute_schedule(cfg)
    terms, residual = formula_value(cfg, schedule.exact)
    d = sum(terms, residual)
    feasible = evaluate_policy_exact(cfg, optimal_policy(cfg, schedule))
    return DistortionFormulaReport(
        cfg=cfg,
        d_min=d,
        schedule=schedule,
        terms=terms,
        residual=residual,
        zero_distortion=d == 0,
        feasible_value=feasible,
    )


def zero_distortion_length(m: int) -> int:
    """Smallest L with zero distortion once the peak weight is no constraint (M a power of two)."""
    return math.ceil(math.log2(m))


@dataclass(frozen=True)
class ClassPrediction:
    """First-hit class k (None for the all-zero class)."""

    k: int | None
    probability: Fraction
    size: Fraction

    @property
    def integral(self) -> bool:
        return self.size.denominator == 1


def predicted_class_stats(cfg: BlockConfig, schedule: ProbeSchedule | None = None) -> list[ClassPrediction]:
    schedule = schedule or compute_schedule(cfg)
    out = [
        ClassPrediction(k, Fraction(c) / cfg.m, Fraction(c) / 2 ** (cfg.l - k))
        for k, c in enumerate(schedule.exact, 1)
    ]
    total = sum(map(Fraction, schedule.exact), Fraction(0))
    out.append(ClassPrediction(None, 1 - total / cfg.m, cfg.m - total))
    return out


def schedule_respects_peak(cfg: BlockConfig, schedule: ProbeSchedule) -> bool:
    return all(c <= cfg.b_peak for c in schedule.exact) and all(
        0 <= c <= cfg.b_peak for c in schedule.feasible
    )


def peak_probability_bound_check(
    first_hit_probs: Mapping[int, float] | Sequence[float],
    cfg: BlockConfig,
    trials: int | None = None,
    z: float = 3.0,
) -> bool:
    """Check ``M * P(first hit at k) <= B_peak`` for every use k.

    With ``trials`` given the probabilities are empirical and each may exceed
    the bound by ``z`` binomial standard errors; otherwise the check is exact.
    """
    items = first_hit_probs.items() if isinstance(first_hit_probs, Mapping) else enumerate(first_hit_probs, 1)
    bound = Fraction(cfg.b_peak, cfg.m)
    for _, p in items:
        if trials is None:
            if Fraction(p) > bound:
                return False
            continue
        slack = z * math.sqrt(max(float(p) * (1 - float(p)), 0.0) / trials)
        # a frequency of 0 or 1 has zero plug-in variance; fall back to one count
        slack = max(slack, z / trials)
        if float(p) > float(bound) + slack:
            return False
    return True
