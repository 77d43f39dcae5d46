"""Step processes: jump kernels, phase bookkeeping, hit detection, and
the walk/flight coupling."""
import numpy as np
import pytest
from scipy import stats

from levysearch import lattice as lat
from levysearch.engine import (HitOutcome, LevyFlight, LevyWalk, VisitCounter,
                               run_until_hit, _Phase)
from levysearch.powerlaw import make_law
from levysearch.search import make_rng


def test_flight_zero_jump_stays():
    law = make_law(2.5)
    flight = LevyFlight(law, make_rng(1))
    # force the d = 0 branch by stepping until one occurs
    seen_stay = False
    prev = flight.position
    for _ in range(64):
        pos = flight.step()
        if pos == prev:
            seen_stay = True
            break
        prev = pos
    assert seen_stay


def test_flight_step_counts():
    law = make_law(2.5)
    flight = LevyFlight(law, make_rng(2))
    for t in range(1, 20):
        flight.step()
        assert flight.steps == t


def test_flight_single_step_kernel():
    # displacement law must match pmf(d) / (4d) per node: monotone radial
    law = make_law(2.5, cap=3)
    rng = make_rng(3)
    counts = {}
    n = 2 * 10 ** 5
    for _ in range(n):
        flight = LevyFlight(law, rng)
        pos = flight.step()
        counts[pos] = counts.get(pos, 0) + 1
    support = [(0, 0)] + [p for d in range(1, 4) for p in lat.ring((0, 0), d)]
    expected = []
    for p in support:
        d = lat.l1(p)
        expected.append(law.pmf(0) if d == 0 else law.pmf(d) / (4 * d))
    observed = [counts.get(p, 0) for p in support]
    assert stats.chisquare(observed, np.array(expected) * n).pvalue > 0.001
    # kernel value is non-increasing in the node's distance
    probs = [law.pmf(d) / (4 * d) for d in range(1, 4)]
    assert all(a >= b for a, b in zip(probs, probs[1:]))


def test_walk_adjacent_steps():
    law = make_law(2.2)
    walk = LevyWalk(law, make_rng(4))
    prev = walk.position
    for _ in range(500):
        pos = walk.step()
        assert lat.l1(prev, pos) <= 1
        prev = pos
    assert walk.steps == 500


def test_phase_consumes_exact_steps():
    # a forced phase of length 5 advances exactly 5 steps
    phase = _Phase((0, 0), 5, (3, 2))
    nodes = [phase.advance(lambda: False) for _ in range(5)]
    assert phase.done
    assert nodes[-1] == (3, 2)
    assert [lat.l1(n) for n in nodes] == [1, 2, 3, 4, 5]


def test_phase_tie_rule_low_is_deterministic():
    law = make_law(2.5)
    a = LevyWalk(law, make_rng(5), tie_rule="low")
    b = LevyWalk(law, make_rng(5), tie_rule="low")
    for _ in range(300):
        assert a.step() == b.step()
    with pytest.raises(ValueError):
        LevyWalk(law, make_rng(5), tie_rule="bogus")


def test_walk_flight_coupling():
    # same (length, destination) draw stream: the walk's phase-endpoint
    # subsequence equals the flight trajectory exactly
    law = make_law(2.3)
    for seed in range(50):
        flight = LevyFlight(law, make_rng(6, seed))
        walk = LevyWalk(law, make_rng(6, seed), coin_rng=make_rng(7, seed))
        endpoints = []
        while len(endpoints) < 25:
            walk.step()
            if walk.at_phase_boundary:
                endpoints.append(walk.position)
        assert endpoints == [flight.step() for _ in range(25)]


def test_run_until_hit_target_at_start():
    law = make_law(2.5)
    walk = LevyWalk(law, make_rng(8))
    assert run_until_hit(walk, (0, 0), 10).hit_step == 0


def test_run_until_hit_budget_below_distance():
    law = make_law(2.5)
    for seed in range(20):
        walk = LevyWalk(law, make_rng(9, seed))
        out = run_until_hit(walk, (7, 2), 8)
        assert out.exhausted and out.hit_step is None


def test_run_until_hit_midphase():
    # target strictly inside a long phase is seen mid-jump
    law = make_law(2.5)
    walk = LevyWalk(law, make_rng(10))
    walk._phase = _Phase((0, 0), 10, (10, 0))
    out = run_until_hit(walk, (4, 0), 20)
    assert out.hit_step == 4


def test_determinism_bit_for_bit():
    law = make_law(2.5)
    t1 = [LevyWalk(law, make_rng(11)).step() for _ in range(1)]
    a = LevyWalk(law, make_rng(11))
    b = LevyWalk(law, make_rng(11))
    assert [a.step() for _ in range(400)] == [b.step() for _ in range(400)]
    f1 = LevyFlight(law, make_rng(12))
    f2 = LevyFlight(law, make_rng(12))
    assert [f1.step() for _ in range(400)] == [f2.step() for _ in range(400)]


def test_visit_counter_totals():
    law = make_law(2.5)
    walk = LevyWalk(law, make_rng(13))
    counter = VisitCounter()
    out = run_until_hit(walk, (999, 999), 200, counter=counter)
    assert out.exhausted
    # step 0 through step 200 inclusive
    assert counter.total() == 201


def test_visit_counter_watched_set():
    counter = VisitCounter(watched=frozenset({(0, 0)}))
    counter.observe((0, 0))
    counter.observe((1, 0))
    assert counter.count((0, 0)) == 1
    assert counter.count((1, 0)) == 0


def test_hit_outcome_semantics():
    out = HitOutcome(hit_step=None, budget=5)
    assert out.exhausted
    out = HitOutcome(hit_step=3, budget=5)
    assert not out.exhausted
    with pytest.raises(ValueError):
        run_until_hit(LevyWalk(make_law(2.5), make_rng(14)), (1, 0), -1)
