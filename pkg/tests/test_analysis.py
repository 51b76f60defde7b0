import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbp.analysis import (
    formula_value,
    min_distortion,
    peak_probability_bound_check,
    predicted_class_stats,
    schedule_respects_peak,
    zero_distortion_length,
)
from bbp.core import validate_config
from bbp.oracle import evaluate_policy_exact, minimize_naive
from bbp.policy import compute_schedule, idle_policy

F = Fraction
GRID_M = (2, 4, 8, 16, 32)
GRID_B = (1, 2, 4, 8, 16, 32)


def grid():
    for m, l, b in itertools.product(GRID_M, range(1, 7), GRID_B):  # noqa: E741
        yield m, l, min(b, m)


@pytest.mark.parametrize(
    "m, l, b, schedule, d, by_hand",
    [
        (4, 2, 2, (2, 1), F(0), F(0)),
        (4, 1, 2, (2,), F(1), F(2 * 1, 4) + F(2 * 1, 4)),
        (8, 2, 2, (2, 2), F(1), F(0) + F(2, 8) + F(6, 8)),
        (8, 2, 1, (1, 1), F(5, 4), F(10, 8)),
    ],
)
def test_min_distortion_examples(m, l, b, schedule, d, by_hand):  # noqa: E741
    c = validate_config(m, l, b)
    rep = min_distortion(c)
    assert rep.schedule.exact == tuple(map(F, schedule))
    assert rep.d_min == d == by_hand
    assert rep.d_min == sum(rep.terms) + rep.residual
    assert rep.zero_distortion == (d == 0)
    # independent ground truth: brute force over every policy tree
    assert minimize_naive(c, budget=10**6).min_distortion == d


def test_terms_breakdown():
    rep = min_distortion(validate_config(8, 2, 2))
    assert rep.terms == (F(0), F(2, 8))
    assert rep.residual == F(6, 8)


def test_residual_uses_fractional_sum():
    c = validate_config(4, 3, 4)
    terms, residual = formula_value(c, compute_schedule(c).exact)
    assert residual == 0 and terms == (0, 0, 0)


@pytest.mark.parametrize("m, l, b", list(grid()))
def test_range_and_peak(m, l, b):  # noqa: E741
    c = validate_config(m, l, b)
    rep = min_distortion(c)
    assert 0 <= rep.d_min <= F(2 * (m - 1), m)
    assert schedule_respects_peak(c, rep.schedule)
    assert peak_probability_bound_check([F(x) / m for x in rep.schedule.exact], c)


def test_upper_range_attained_by_idle_policy():
    for m in GRID_M:
        c = validate_config(m, 3, 1)
        assert evaluate_policy_exact(c, idle_policy(c)) == F(2 * (m - 1), m)


def test_monotone_over_grid():
    d = {t: min_distortion(validate_config(*t)).d_min for t in grid()}
    for (m, l, b), v in d.items():  # noqa: E741
        if (m, l + 1, b) in d:
            assert d[(m, l + 1, b)] <= v
        bigger = [bb for bb in GRID_B if bb > b and bb <= m]
        if bigger:
            assert d[(m, l, bigger[0])] <= v


@given(st.integers(1, 6), st.integers(1, 8))
def test_zero_distortion_threshold_dyadic(k, l):  # noqa: E741
    m = 2**k
    for b in range(m // 2, m + 1):
        rep = min_distortion(validate_config(m, l, b))
        assert rep.zero_distortion == (l >= k) == (l >= zero_distortion_length(m))


@given(st.integers(2, 40), st.integers(1, 7), st.data())
def test_formula_matches_feasible_strategy(m, l, data):  # noqa: E741
    c = validate_config(m, l, data.draw(st.integers(1, m)))
    rep = min_distortion(c)
    assert rep.feasible_value >= 0
    if rep.schedule.dyadic:
        assert rep.feasible_matches


def test_class_stats_dyadic():
    stats = predicted_class_stats(validate_config(16, 4, 16))
    assert [s.k for s in stats] == [1, 2, 3, 4, None]
    assert [s.probability for s in stats] == [F(1, 2), F(1, 4), F(1, 8), F(1, 16), F(1, 16)]
    assert [s.size for s in stats] == [1] * 5
    assert all(s.integral for s in stats)


def test_class_stats_non_integral_size_flagged():
    stats = predicted_class_stats(validate_config(8, 2, 1))
    assert (stats[0].probability, stats[0].size, stats[0].integral) == (F(1, 8), F(1, 2), False)
    assert (stats[1].probability, stats[1].size) == (F(1, 8), 1)
    assert (stats[2].probability, stats[2].size) == (F(6, 8), 6)


def test_class_stats_two_directions():
    stats = predicted_class_stats(validate_config(2, 1, 1))
    assert [(s.probability, s.size) for s in stats] == [(F(1, 2), 1), (F(1, 2), 1)]


@given(st.integers(2, 100), st.integers(1, 8), st.data())
def test_class_probabilities_sum_to_one(m, l, data):  # noqa: E741
    stats = predicted_class_stats(validate_config(m, l, data.draw(st.integers(1, m))))
    assert sum(s.probability for s in stats) == 1


def test_peak_check_negative_control():
    c = validate_config(16, 4, 4)
    # a log where half the blocks hit at use 1 needs probes of weight 8
    assert not peak_probability_bound_check({1: 0.5, 2: 0.1}, c, trials=10_000)
    assert peak_probability_bound_check({1: 0.25, 2: 0.25}, c, trials=10_000)
    assert peak_probability_bound_check({1: 0.2531}, c, trials=10_000)
    assert not peak_probability_bound_check([F(5, 16)], c)


def test_zero_distortion_length():
    assert [zero_distortion_length(m) for m in (2, 4, 16, 32)] == [1, 2, 4, 5]
    assert zero_distortion_length(5) == math.ceil(math.log2(5))
