"""Probe-size schedule and adaptive probing strategies.

A policy picks each probe from the feedback prefix and the tracked ambiguity
set only. Every policy reduces a decision to a :class:`ProbeDraw`: take
``size`` directions out of ``pool``, either the lowest-indexed ones
(canonical mode) or uniformly without replacement (random mode).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .core import BlockConfig, InputMask


class Mode(str, Enum):
    CANONICAL = "canonical"
    RANDOM = "random"


@dataclass(frozen=True)
class ProbeSchedule:
    exact: tuple[Fraction, ...]
    feasible: tuple[int, ...]

    @property
    def dyadic(self) -> bool:
        return all(Fraction(c) == e for c, e in zip(self.feasible, self.exact))


def compute_schedule(cfg: BlockConfig) -> ProbeSchedule:
    exact: list[Fraction] = []
    feasible: list[int] = []
    used_exact = Fraction(0)
    used = 0
    for _ in range(cfg.l):
        c = min((cfg.m - used_exact) / 2, Fraction(cfg.b_peak))
        exact.append(c)
        used_exact += c
        ci = min((cfg.m - used) // 2, cfg.b_peak)
        feasible.append(ci)
        used += ci
    return ProbeSchedule(tuple(exact), tuple(feasible))


@dataclass(frozen=True)
class ProbeDraw:
    pool: tuple[int, ...]
    size: int


def first_hit(feedback: Sequence[int]) -> int | None:
    """1-based index of the first 1 in ``feedback``, or None for all-zero."""
    return feedback.index(1) + 1 if 1 in feedback else None


class Policy:
    """Base class. Subclasses implement :meth:`draw`."""

    name = "policy"
    randomized = False

    def __init__(self, cfg: BlockConfig, mode: Mode = Mode.CANONICAL):
        self.cfg = cfg
        self.mode = Mode(mode)

    @property
    def label(self) -> str:
        return self.name

    @property
    def stochastic(self) -> bool:
        return self.randomized or self.mode is Mode.RANDOM

    def draw(self, j: int, feedback: Sequence[int], ambiguity: Sequence[int]) -> ProbeDraw:
        raise NotImplementedError

    def next_probe(
        self,
        j: int,
        feedback: Sequence[int],
        ambiguity: Sequence[int],
        rng: random.Random | None = None,
    ) -> InputMask:
        d = self.draw(j, feedback, ambiguity)
        size = min(d.size, len(d.pool))
        if size == 0:
            support: Sequence[int] = ()
        elif not self.stochastic or size == len(d.pool):
            support = d.pool[:size]
        else:
            if rng is None:
                raise ValueError(f"{self.label} needs a random source")
            support = rng.sample(d.pool, size)
        return InputMask.of(self.cfg, support)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.cfg}, mode={self.mode.value})"


class OptimalPolicy(Policy):
    """Schedule-driven search: fresh probes of size c_j until the first hit, then halving."""

    name = "optimal"

    def __init__(self, cfg: BlockConfig, schedule: ProbeSchedule | None = None,
                 mode: Mode = Mode.CANONICAL):
        super().__init__(cfg, mode)
        self.schedule = schedule or compute_schedule(cfg)
        if len(self.schedule.feasible) != cfg.l:
            raise ValueError("schedule length does not match L")

    def draw(self, j, feedback, ambiguity):
        pool = tuple(ambiguity)
        if first_hit(feedback) is None:
            # before any hit the ambiguity set is exactly the never-probed directions
            return ProbeDraw(pool, self.schedule.feasible[j - 1])
        return ProbeDraw(pool, (len(pool) + 1) // 2)


class SweepPolicy(Policy):
    """Beam sweeping: direction j at use j until something answers."""

    name = "sweep"

    def draw(self, j, feedback, ambiguity):
        if first_hit(feedback) is not None or j > self.cfg.m:
            return ProbeDraw((), 0)
        return ProbeDraw((j,), 1)


class RandomPolicy(Policy):
    """Open-loop control: a fresh uniform weight-``w`` mask each use."""

    randomized = True

    def __init__(self, cfg: BlockConfig, weight: int):
        if not 1 <= weight <= cfg.b_peak:
            raise ValueError(f"weight must lie in 1..{cfg.b_peak} (got {weight})")
        super().__init__(cfg, Mode.RANDOM)
        self.weight = weight
        self._all = tuple(cfg.directions)

    @property
    def label(self) -> str:
        return f"random:{self.weight}"

    def draw(self, j, feedback, ambiguity):
        return ProbeDraw(self._all, self.weight)


class IdlePolicy(Policy):
    """Never probes; the estimator is left with all M directions."""

    name = "idle"

    def draw(self, j, feedback, ambiguity):
        return ProbeDraw((), 0)


def optimal_policy(cfg: BlockConfig, schedule: ProbeSchedule | None = None,
                   mode: Mode | str = Mode.CANONICAL) -> OptimalPolicy:
    return OptimalPolicy(cfg, schedule, Mode(mode))


def sweep_policy(cfg: BlockConfig) -> SweepPolicy:
    return SweepPolicy(cfg)


def random_policy(cfg: BlockConfig, weight: int) -> RandomPolicy:
    return RandomPolicy(cfg, weight)


def idle_policy(cfg: BlockConfig) -> IdlePolicy:
    return IdlePolicy(cfg)


def parse_policy(selector: str, cfg: BlockConfig, mode: Mode | str = Mode.CANONICAL) -> Policy:
    """Build a policy from a CLI selector: ``optimal``, ``sweep``, ``idle`` or ``random:w``."""
    name, _, arg = selector.strip().partition(":")
    if name == "optimal" and not arg:
        return optimal_policy(cfg, mode=mode)
    if name == "sweep" and not arg:
        return sweep_policy(cfg)
    if name == "idle" and not arg:
        return idle_policy(cfg)
    if name == "random" and arg:
        try:
            w = int(arg)
        except ValueError:
            raise ValueError(f"bad random weight in {selector!r}") from None
        return random_policy(cfg, w)
    raise ValueError(f"unknown policy selector {selector!r}")
