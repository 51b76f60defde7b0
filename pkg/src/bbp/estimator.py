"""Ambiguity-set tracking and the Bayes estimator at block end.

With a uniform prior and a noiseless channel, the posterior after any
(probe, feedback) log is uniform on the directions consistent with the log,
so the consistent set is a sufficient statistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import BeamIndex, BlockConfig, InputMask


class InconsistentTrajectory(ValueError):
    """No direction is consistent with the observed probes and feedback."""


@dataclass(frozen=True)
class AmbiguitySet:
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise InconsistentTrajectory("ambiguity set is empty")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, s: object) -> bool:
        return s in self.members


@dataclass(frozen=True)
class Estimate:
    s_hat: BeamIndex
    posterior_support: AmbiguitySet
    conditional_distortion: Fraction


def init_ambiguity(cfg: BlockConfig) -> AmbiguitySet:
    return AmbiguitySet(tuple(cfg.directions))


def refine(members: Sequence[int], probe: InputMask, y: int) -> tuple[int, ...]:
    """Members consistent with one more observation; may be empty."""
    support = probe.support
    if y:
        return tuple(s for s in members if s in support)
    return tuple(s for s in members if s not in support)


def update_ambiguity(current: AmbiguitySet, probe: InputMask, y: int) -> AmbiguitySet:
    members = refine(current.members, probe, y)
    if not members:
        raise InconsistentTrajectory(
            f"inconsistent trajectory: y={y} after probe {probe} leaves no candidate"
        )
    return AmbiguitySet(members)


def consistent_states(
    cfg: BlockConfig, probes: Iterable[InputMask], outputs: Iterable[int]
) -> tuple[int, ...]:
    """Filter all M directions against a full log; the brute-force reference for tracking."""
    log = list(zip(probes, outputs))
    return tuple(
        s for s in cfg.directions if all(int(s in p.support) == y for p, y in log)
    )


def posterior(current: AmbiguitySet) -> dict[int, Fraction]:
    p = Fraction(1, len(current))
    return {s: p for s in current.members}


def conditional_distortion(size: int) -> Fraction:
    return Fraction(2 * (size - 1), size)


def estimate(current: AmbiguitySet) -> Estimate:
    # every member has the same Bayes risk; the smallest index keeps runs reproducible
    return Estimate(
        s_hat=current.members[0],
        posterior_support=current,
        conditional_distortion=conditional_distortion(len(current)),
    )


def bayes_risk(post: dict[int, Fraction], s_hat: int) -> Fraction:
    """Expected Hamming distortion of guessing ``s_hat`` under ``post``."""
    return sum((p * (0 if s == s_hat else 2) for s, p in post.items()), Fraction(0))
