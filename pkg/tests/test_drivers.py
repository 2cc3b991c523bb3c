"""Call schedules, budgets, and the continuous-to-integral reduction."""

from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

from dynbal.algorithms import (
    GaplessBalance,
    SmoothedBalance,
    decompose_by_unit,
    gapless_schedule,
    recombine_by_unit,
    smoothed_calls_budget,
)
from dynbal.dyadic import Dyadic
from dynbal.loads import total_load


def test_smoothed_calls_budget_values():
    assert smoothed_calls_budget(1024, 1) == 28
    assert smoothed_calls_budget(2, 1) == 3
    assert smoothed_calls_budget(8, 8) == 0
    assert smoothed_calls_budget(0, 1) == 0
    assert smoothed_calls_budget(512, Dyadic(2)) == 23


def test_gapless_schedule_frozen():
    assert gapless_schedule(16, 1) == [16, 12, 9, 6, 4, 3, 2]
    assert gapless_schedule(2, 1) == [2]
    assert gapless_schedule(1, 1) == [1]


@given(st.integers(1, 10**5), st.integers(1, 64))
def test_gapless_schedule_terminates_below_target(total, tau):
    schedule = gapless_schedule(total, tau)
    stop = -((-4 * tau) // 3)
    assert schedule[-1] <= stop
    assert all(a > b for a, b in zip(schedule, schedule[1:]))
    # Only the last entry may sit at or below the stop threshold.
    assert all(psi > stop for psi in schedule[:-1])


def test_smoothed_balance_skips_when_already_converged():
    alg = SmoothedBalance()
    loads = [4, 4, 5, 4]
    alg.start(loads, "integral", Random(0), k=Fraction(1), tau=1, n=4)
    assert alg.is_done(loads)
    assert alg.calls_started == 0


def test_smoothed_balance_planned_rounds():
    alg = SmoothedBalance(c1=Fraction(2))
    alg.start([1024] + [0] * 15, "integral", Random(0), k=Fraction(1), tau=1, n=16)
    assert alg.calls_budget == 28
    assert alg.planned_rounds() == 28 * (16 + 3014)


def test_gapless_balance_runs_the_whole_schedule():
    # tau-converged input: every call is spawned but each fast-forwards
    # without moving anything.
    alg = GaplessBalance()
    loads = [3, 3, 3, 4]
    alg.start(loads, "integral", Random(0), k=Fraction(1), tau=1, n=4)
    expected_schedule = gapless_schedule(13, 1)
    budget = alg.planned_rounds()
    consumed = 0
    while not alg.is_done(loads):
        skipped = alg.consume_idle_rounds(loads, budget)
        assert skipped > 0, "converged input must only fast-forward"
        consumed += skipped
    assert alg.calls_started == len(expected_schedule)
    assert consumed == budget


# ----------------------------------------------------------------------
# continuous loads via a base unit
# ----------------------------------------------------------------------


def test_decompose_examples():
    unit = Dyadic(1, 3)  # 1/8
    q, r = decompose_by_unit([Dyadic(3, 3), Dyadic(5, 4), Dyadic(0)], unit)
    assert q == [3, 2, 0]
    assert r == [Dyadic(0), Dyadic(1, 4), Dyadic(0)]
    assert recombine_by_unit(q, r, unit) == [Dyadic(3, 3), Dyadic(5, 4), Dyadic(0)]


def test_decompose_rejects_zero_unit():
    with pytest.raises(ValueError):
        decompose_by_unit([Dyadic(1)], Dyadic(0))


@settings(max_examples=200)
@given(
    st.lists(st.builds(Dyadic, st.integers(0, 4096), st.integers(0, 8)), min_size=1, max_size=8),
    st.integers(0, 5),
)
def test_decompose_recombine_roundtrip(loads, unit_exp):
    unit = Dyadic(1, unit_exp)
    q, r = decompose_by_unit(loads, unit)
    assert all(isinstance(x, int) and x >= 0 for x in q)
    assert all(0 <= rem < unit for rem in r)
    assert recombine_by_unit(q, r, unit) == loads


@given(
    st.lists(st.builds(Dyadic, st.integers(0, 1024), st.integers(0, 6)), min_size=1, max_size=8),
)
def test_recombined_totals_survive_integral_rebalancing(loads):
    # Whatever the integral run does to the quotients, conservation of the
    # integer total plus frozen remainders conserves the real total.
    unit = Dyadic(1, 2)
    q, r = decompose_by_unit(loads, unit)
    shuffled = list(reversed(q))  # stand-in for any total-preserving run
    rebuilt = recombine_by_unit(shuffled, r, unit)
    assert total_load(rebuilt) == total_load(loads) + unit * (sum(shuffled) - sum(q))
