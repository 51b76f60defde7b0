"""Exact policy evaluation and exhaustive minimization over deterministic policies.

A deterministic policy is a depth-L tree indexed by feedback history. Every
state is routed to exactly one leaf, the states reaching a leaf are that
leaf's ambiguity set, and the expected block distortion is the sum of
``2 [|leaf| - 1]^+ / M`` over leaves.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping

from .core import EMPTY_MASK, BlockConfig, InputMask, block_risk, check_mask
from .estimator import refine
from .policy import Policy, ProbeDraw

History = tuple[int, ...]

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget: int):
        self.estimate = estimate
        self.budget = budget
        super().__init__(
            f"enumeration needs {estimate:.3e} policy trees, budget is {budget:.3e}"
            if estimate >= 10**6
            else f"enumeration needs {estimate} policy trees, budget is {budget}"
        )


@dataclass(frozen=True)
class PolicyTree:
    """Probe per feedback history; histories not listed probe nothing."""

    cfg: BlockConfig
    probes: Mapping[History, InputMask] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for h, mask in self.probes.items():
            if len(h) >= self.cfg.l or any(y not in (0, 1) for y in h):
                raise ValueError(f"history {h} is not a node of a depth-{self.cfg.l} tree")
            check_mask(self.cfg, mask)

    def probe(self, history: History) -> InputMask:
        return self.probes.get(history, EMPTY_MASK)

    def route(self, state: int) -> History:
        h: History = ()
        for _ in range(self.cfg.l):
            h += (int(state in self.probe(h).support),)
        return h

    def histories(self) -> Iterator[History]:
        for depth in range(self.cfg.l):
            yield from itertools.product((0, 1), repeat=depth)

    def table(self) -> list[tuple[str, str]]:
        """(history, probe) rows over the full tree, root first."""
        return [("".join(map(str, h)) or "-", str(self.probe(h))) for h in self.histories()]


@dataclass(frozen=True)
class OracleResult:
    min_distortion: Fraction
    argmin_tree: PolicyTree
    policies_evaluated: int


def policy_tree(cfg: BlockConfig, policy: Policy, full: bool = False) -> PolicyTree:
    """Tabulate a deterministic policy.

    Only histories some state can produce are stored unless ``full`` is set.
    """
    if policy.stochastic:
        raise ValueError(f"{policy.label} is randomized and has no single tree")
    probes: dict[History, InputMask] = {}

    def walk(h: History, members: tuple[int, ...]) -> None:
        if len(h) == cfg.l or not (members or full):
            return
        mask = policy.next_probe(len(h) + 1, h, members)
        if mask.support:
            probes[h] = mask
        walk(h + (1,), refine(members, mask, 1))
        walk(h + (0,), refine(members, mask, 0))

    walk((), tuple(cfg.directions))
    return PolicyTree(cfg, probes)


def leaf_sets(tree: PolicyTree) -> dict[History, tuple[int, ...]]:
    leaves: dict[History, list[int]] = defaultdict(list)
    for s in tree.cfg.directions:
        leaves[tree.route(s)].append(s)
    return {h: tuple(v) for h, v in leaves.items()}


def evaluate_tree(tree: PolicyTree) -> Fraction:
    m = tree.cfg.m
    return sum((block_risk(len(b), m) for b in leaf_sets(tree).values()), Fraction(0))


def evaluate_policy_exact(cfg: BlockConfig, policy: PolicyTree | Policy) -> Fraction:
    """Exact expected per-block distortion of a tree or a policy object.

    Randomized policies are averaged over every equally likely draw.
    """
    if isinstance(policy, PolicyTree):
        if policy.cfg != cfg:
            raise ValueError("tree was built for a different config")
        return evaluate_tree(policy)
    if not policy.stochastic:
        return evaluate_tree(policy_tree(cfg, policy))
    return _expected_randomized(cfg, policy)


def _expected_randomized(cfg: BlockConfig, policy: Policy) -> Fraction:
    @lru_cache(maxsize=None)
    def value(j: int, fb: History, members: tuple[int, ...]) -> Fraction:
        if not members:
            return Fraction(0)
        if j > cfg.l:
            return block_risk(len(members), cfg.m)
        d = policy.draw(j, fb, members)
        size = min(d.size, len(d.pool))
        if size in (0, len(d.pool)):
            draws = [frozenset(d.pool[:size])]
        else:
            draws = map(frozenset, itertools.combinations(d.pool, size))
        outcomes: Counter[tuple[int, ...]] = Counter()
        n = 0
        for support in draws:
            outcomes[tuple(s for s in members if s in support)] += 1
            n += 1
        total = Fraction(0)
        for hit, count in outcomes.items():
            miss = tuple(s for s in members if s not in hit)
            total += count * (value(j + 1, fb + (1,), hit) + value(j + 1, fb + (0,), miss))
        return total / n

    return value(1, (), tuple(cfg.directions))


def count_reduced_trees(cfg: BlockConfig) -> int:
    """Number of policy trees once probes are identified by how many candidates they cover."""

    @lru_cache(maxsize=None)
    def count(a: int, r: int) -> int:
        if r == 0:
            return 1
        return sum(count(t, r - 1) * count(a - t, r - 1) for t in range(min(a, cfg.b_peak) + 1))

    return count(cfg.m, cfg.l)


def minimize_over_policies(cfg: BlockConfig, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Exact minimum expected distortion over all deterministic probing policies.

    Relabeling directions does not change the uniform prior or the loss, so a
    node's probe matters only through how many of the node's candidates it
    covers; directions outside the candidate set never change routing. The
    search therefore covers every reduced tree, and since sibling subtrees
    are independent the minimum over their product is the sum of minima.
    """
    size = count_reduced_trees(cfg)
    if size > budget:
        raise BudgetExceeded(size, budget)

    @lru_cache(maxsize=None)
    def best(a: int, r: int) -> tuple[Fraction, int]:
        if r == 0 or a == 0:
            return block_risk(a, cfg.m), 0
        return min(
            (best(t, r - 1)[0] + best(a - t, r - 1)[0], t)
            for t in range(min(a, cfg.b_peak) + 1)
        )

    probes: dict[History, InputMask] = {}

    def build(h: History, members: tuple[int, ...]) -> None:
        r = cfg.l - len(h)
        if r == 0 or not members:
            return
        t = best(len(members), r)[1]
        if t:
            probes[h] = InputMask.of(cfg, members[:t])
        build(h + (1,), members[:t])
        build(h + (0,), members[t:])

    build((), tuple(cfg.directions))
    tree = PolicyTree(cfg, probes)
    value = best(cfg.m, cfg.l)[0]
    assert evaluate_tree(tree) == value
    return OracleResult(value, tree, size)


def all_masks(cfg: BlockConfig) -> list[InputMask]:
    return [
        InputMask(frozenset(c))
        for w in range(cfg.b_peak + 1)
        for c in itertools.combinations(cfg.directions, w)
    ]


def naive_tree_count(cfg: BlockConfig) -> int:
    return len(all_masks(cfg)) ** (2**cfg.l - 1)


def minimize_naive(cfg: BlockConfig, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Brute force over every assignment of a legal mask to every tree node."""
    size = naive_tree_count(cfg)
    if size > budget:
        raise BudgetExceeded(size, budget)
    masks = all_masks(cfg)
    nodes = [h for depth in range(cfg.l) for h in itertools.product((0, 1), repeat=depth)]
    best_value: Fraction | None = None
    best_tree: PolicyTree | None = None
    n = 0
    for choice in itertools.product(masks, repeat=len(nodes)):
        tree = PolicyTree(cfg, dict(zip(nodes, choice)))
        v = evaluate_tree(tree)
        n += 1
        if best_value is None or v < best_value:
            best_value, best_tree = v, tree
    assert best_value is not None and best_tree is not None
    return OracleResult(best_value, best_tree, n)


class TreePolicy(Policy):
    """Play a :class:`PolicyTree` as a policy so it can be simulated."""

    name = "tree"

    def __init__(self, tree: PolicyTree):
        super().__init__(tree.cfg)
        self.tree = tree

    def draw(self, j, feedback, ambiguity):
        support = tuple(sorted(self.tree.probe(tuple(feedback)).support))
        return ProbeDraw(support, len(support))
