"""Domain types shared by every module: block configuration, probe masks, distortion."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

BeamIndex = int
"""A direction index in ``1..M``; the one-hot state vector is recovered by :func:`one_hot`."""


class InvalidConfig(ValueError):
    """Base class for rejected ``(M, L, B_peak)`` triples."""


class DirectionCountError(InvalidConfig):
    pass


class BlockLengthError(InvalidConfig):
    pass


class PeakWeightTooSmall(InvalidConfig):
    pass


class PeakWeightTooLarge(InvalidConfig):
    pass


class PeakConstraintViolation(ValueError):
    """A probe mask exceeds the peak Hamming weight or leaves ``1..M``."""


@dataclass(frozen=True)
class BlockConfig:
    m: int
    l: int  # noqa: E741
    b_peak: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise DirectionCountError(f"M must be >= 2 (got {self.m})")
        if self.l < 1:
            raise BlockLengthError(f"L must be >= 1 (got {self.l})")
        if self.b_peak < 1:
            raise PeakWeightTooSmall(f"b_peak must be >= 1 (got {self.b_peak})")
        if self.b_peak > self.m:
            raise PeakWeightTooLarge(f"b_peak exceeds M ({self.b_peak} > {self.m})")

    @property
    def directions(self) -> range:
        return range(1, self.m + 1)

    def check_index(self, s: int) -> int:
        if not 1 <= s <= self.m:
            raise ValueError(f"beam index {s} outside 1..{self.m}")
        return s


def validate_config(m: int, l: int, b_peak: int) -> BlockConfig:  # noqa: E741
    for name, v in (("m", m), ("l", l), ("b_peak", b_peak)):
        if isinstance(v, bool) or not isinstance(v, int):
            raise InvalidConfig(f"{name} must be an integer (got {v!r})")
    return BlockConfig(m, l, b_peak)


@dataclass(frozen=True)
class InputMask:
    """Positions of the ones in a channel input vector.

    Build masks through :meth:`of` so the peak weight is checked against a config.
    The empty mask is legal and means "probe nothing".
    """

    support: frozenset[int]

    @classmethod
    def of(cls, cfg: BlockConfig, support: Iterable[int]) -> InputMask:
        mask = cls(frozenset(support))
        check_mask(cfg, mask)
        return mask

    @property
    def weight(self) -> int:
        return len(self.support)

    def __contains__(self, s: object) -> bool:
        return s in self.support

    def vector(self, m: int) -> tuple[int, ...]:
        return tuple(int(i in self.support) for i in range(1, m + 1))

    def __str__(self) -> str:
        return "{" + ",".join(map(str, sorted(self.support))) + "}"


EMPTY_MASK = InputMask(frozenset())


def check_mask(cfg: BlockConfig, mask: InputMask) -> None:
    if len(mask.support) > cfg.b_peak:
        raise PeakConstraintViolation(
            f"probe weight {len(mask.support)} exceeds b_peak={cfg.b_peak}"
        )
    for i in mask.support:
        if not 1 <= i <= cfg.m:
            raise PeakConstraintViolation(f"probe index {i} outside 1..{cfg.m}")


def one_hot(s: BeamIndex, m: int) -> tuple[int, ...]:
    return tuple(int(i == s) for i in range(1, m + 1))


def hamming_distortion(s: BeamIndex, s_hat: BeamIndex) -> Fraction:
    """Hamming distance between two one-hot vectors: 0 when equal, else 2."""
    return Fraction(0) if s == s_hat else Fraction(2)


def positive_part(x: Fraction | int) -> Fraction:
    return Fraction(x) if x > 0 else Fraction(0)


def block_risk(size: int, m: int) -> Fraction:
    """Contribution ``2 [size - 1]^+ / M`` of one leaf holding ``size`` states."""
    return Fraction(2 * max(size - 1, 0), m)
