"""The beam-pointing channel with in-block memory and one-use-delayed feedback."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .core import BeamIndex, BlockConfig, InputMask
from .estimator import AmbiguitySet, InconsistentTrajectory, refine
from .policy import Policy

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class BlockTrajectory:
    state: BeamIndex
    inputs: tuple[InputMask, ...]
    outputs: tuple[int, ...]
    ambiguity: AmbiguitySet


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer (Steele, Lea & Flood 2014)."""
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(seed: int, index: int) -> int:
    """Seed of trial ``index`` under master ``seed``.

    ``splitmix64(seed + (index + 1) * golden)`` taken mod 2**64. Each trial only
    depends on its own index, so trials may run in any order or in parallel.
    """
    return splitmix64((seed & _MASK64) + (index + 1) * _GOLDEN)


def state_from_word(cfg: BlockConfig, word: int) -> BeamIndex:
    # multiply-shift; bias is below M / 2**64
    return ((word * cfg.m) >> 64) + 1


def trial_rng(word: int) -> random.Random:
    """Random source for a trial's probe selections, independent of its state word."""
    return random.Random(splitmix64(word ^ _GOLDEN))


def sample_state(cfg: BlockConfig, rng: random.Random) -> BeamIndex:
    return rng.randrange(cfg.m) + 1


def channel_output(state: BeamIndex, probe: InputMask) -> int:
    """Inner product of the one-hot state with the input vector."""
    return int(state in probe.support)


def run_block(
    cfg: BlockConfig,
    policy: Policy,
    state: BeamIndex,
    rng: random.Random | None = None,
) -> BlockTrajectory:
    """Run one block of L uses. The policy only ever sees outputs of earlier uses."""
    cfg.check_index(state)
    members: tuple[int, ...] = tuple(cfg.directions)
    inputs: list[InputMask] = []
    outputs: tuple[int, ...] = ()
    for j in range(1, cfg.l + 1):
        probe = policy.next_probe(j, outputs, members, rng)
        y = channel_output(state, probe)
        inputs.append(probe)
        outputs += (y,)
        members = refine(members, probe, y)
        if not members:
            raise InconsistentTrajectory(f"no direction consistent after use {j}")
    return BlockTrajectory(state, tuple(inputs), outputs, AmbiguitySet(members))


def replay_inputs(
    cfg: BlockConfig,
    policy: Policy,
    feedback: Sequence[int],
    rng: random.Random | None = None,
) -> tuple[InputMask, ...]:
    """Probes a policy emits when fed a forced feedback sequence (no state involved).

    Forced feedback may be infeasible; the ambiguity set is then allowed to go empty.
    """
    members: tuple[int, ...] = tuple(cfg.directions)
    probes = []
    for j in range(1, len(feedback) + 1):
        probe = policy.next_probe(j, tuple(feedback[: j - 1]), members, rng)
        probes.append(probe)
        members = refine(members, probe, feedback[j - 1])
    return tuple(probes)
