import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbp.channel import run_block
from bbp.core import validate_config
from bbp.estimator import estimate
from bbp.oracle import evaluate_policy_exact
from bbp.policy import (
    Mode,
    compute_schedule,
    first_hit,
    idle_policy,
    optimal_policy,
    parse_policy,
    random_policy,
    sweep_policy,
)

F = Fraction


def reference_exact_schedule(m, l, b):  # noqa: E741
    out = []
    for _ in range(l):
        out.append(min(F(m - sum(out), 2), F(b)))
    return out


@pytest.mark.parametrize(
    "m, l, b, exact, feasible",
    [
        (16, 4, 16, (8, 4, 2, 1), (8, 4, 2, 1)),
        (8, 2, 1, (1, 1), (1, 1)),
        (16, 3, 3, (3, 3, 3), (3, 3, 3)),
        (4, 3, 4, (2, 1, F(1, 2)), (2, 1, 0)),
        (6, 2, 3, (3, F(3, 2)), (3, 1)),
    ],
)
def test_compute_schedule(m, l, b, exact, feasible):  # noqa: E741
    s = compute_schedule(validate_config(m, l, b))
    assert s.exact == tuple(map(F, exact))
    assert s.feasible == feasible


@given(st.integers(2, 200), st.integers(1, 12), st.data())
def test_schedule_invariants(m, l, data):  # noqa: E741
    b = data.draw(st.integers(1, m))
    s = compute_schedule(validate_config(m, l, b))
    assert list(s.exact) == reference_exact_schedule(m, l, b)
    assert all(0 <= c <= b for c in s.feasible) and sum(s.feasible) <= m
    assert all(c <= b for c in s.exact)


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("l", range(1, 7))
@pytest.mark.parametrize("bk", range(0, 7))
def test_dyadic_schedule_agrees(k, l, bk):  # noqa: E741
    m, b = 2**k, 2**bk
    if b > m:
        return
    s = compute_schedule(validate_config(m, l, b))
    for e, f in zip(s.exact, s.feasible):
        if f == 0:
            break
        assert e == f


def probes_and_outputs(c, policy, state):
    t = run_block(c, policy, state)
    return [sorted(p.support) for p in t.inputs], list(t.outputs), t.ambiguity.members


def test_optimal_traces():
    c = validate_config(4, 2, 2)
    assert probes_and_outputs(c, optimal_policy(c), 4) == ([[1, 2], [3]], [0, 0], (4,))
    assert probes_and_outputs(c, optimal_policy(c), 1) == ([[1, 2], [1]], [1, 1], (1,))
    c = validate_config(8, 2, 2)
    p, y, amb = probes_and_outputs(c, optimal_policy(c), 7)
    assert (p, y, amb) == ([[1, 2], [3, 4]], [0, 0], (5, 6, 7, 8))
    assert estimate_risk(amb) == F(3, 2)


def estimate_risk(members):
    from bbp.estimator import AmbiguitySet

    return estimate(AmbiguitySet(members)).conditional_distortion


def test_sweep_traces():
    c = validate_config(4, 4, 1)
    p, y, amb = probes_and_outputs(c, sweep_policy(c), 3)
    assert y == [0, 0, 1, 0] and amb == (3,)
    c = validate_config(4, 2, 1)
    assert probes_and_outputs(c, sweep_policy(c), 4)[2] == (3, 4)
    c = validate_config(2, 1, 1)
    assert probes_and_outputs(c, sweep_policy(c), 2)[2] == (2,)


def brute_random_policy_value(m, w, l):  # noqa: E741
    """Average over every mask sequence and state of the block-end risk."""
    import itertools

    masks = list(itertools.combinations(range(1, m + 1), w))
    total = F(0)
    n = 0
    for seq in itertools.product(masks, repeat=l):
        for s in range(1, m + 1):
            cons = [t for t in range(1, m + 1) if all((t in q) == (s in q) for q in seq)]
            total += F(2 * (len(cons) - 1), len(cons))
            n += 1
    return total / n


@pytest.mark.parametrize(
    "m, w, l, expected",
    [(4, 2, 1, F(1)), (8, 1, 1, F(12, 8)), (4, 1, 2, None), (5, 2, 2, None)],
)
def test_random_policy_exact(m, w, l, expected):  # noqa: E741
    c = validate_config(m, l, max(w, 2))
    brute = brute_random_policy_value(m, w, l)
    if expected is not None:
        assert brute == expected
    assert evaluate_policy_exact(c, random_policy(c, w)) == brute


def test_random_policy_weight_bound():
    with pytest.raises(ValueError):
        random_policy(validate_config(4, 1, 2), 4)
    with pytest.raises(ValueError):
        random_policy(validate_config(4, 1, 2), 0)


def test_empty_probe_when_schedule_hits_zero():
    c = validate_config(2, 3, 1)
    t = run_block(c, optimal_policy(c), 2)
    assert [p.weight for p in t.inputs] == [1, 0, 0]


def test_parse_policy():
    c = validate_config(8, 2, 4)
    assert parse_policy("optimal", c).label == "optimal"
    assert parse_policy("optimal", c, "random").mode is Mode.RANDOM
    assert parse_policy("sweep", c).label == "sweep"
    assert parse_policy("random:3", c).weight == 3
    assert parse_policy("idle", c).label == "idle"
    for bad in ("random", "random:x", "bogus", "sweep:2"):
        with pytest.raises(ValueError):
            parse_policy(bad, c)


def test_first_hit():
    assert first_hit((0, 0, 1, 1)) == 3
    assert first_hit((0, 0)) is None
    assert first_hit(()) is None


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 64), st.integers(1, 8), st.data())
def test_weight_legality_and_prehit_disjointness(m, l, data):  # noqa: E741
    c = validate_config(m, l, data.draw(st.integers(1, m)))
    seed = data.draw(st.integers(0, 2**32))
    state = data.draw(st.integers(1, m))
    pols = [optimal_policy(c), optimal_policy(c, mode="random"), sweep_policy(c), idle_policy(c),
            random_policy(c, data.draw(st.integers(1, c.b_peak)))]
    for p in pols:
        t = run_block(c, p, state, random.Random(seed))
        assert all(x.weight <= c.b_peak for x in t.inputs)
        if p.label == "optimal":
            k = first_hit(t.outputs) or l + 1
            pre = [x.support for x in t.inputs[: k - 1]]
            assert sum(map(len, pre)) == len(frozenset().union(*pre))
            sched = p.schedule.feasible
            assert [len(x) for x in pre] == list(sched[: k - 1])


@pytest.mark.parametrize("m, l, b", [(4, 2, 2), (8, 2, 2), (8, 3, 4), (6, 2, 3), (5, 3, 2), (8, 4, 1)])
def test_mode_equivalence_exact(m, l, b):  # noqa: E741
    c = validate_config(m, l, b)
    assert evaluate_policy_exact(c, optimal_policy(c, mode="random")) == evaluate_policy_exact(c, optimal_policy(c))


def test_idle_policy_is_worst_case():
    c = validate_config(8, 3, 4)
    assert evaluate_policy_exact(c, idle_policy(c)) == F(2 * 7, 8)
