import json

import numpy as np
import pytest

from crowdbid.domain import Campaign, Participant, Task
from crowdbid.greedy import run_primary
from crowdbid.oracle import (
    critical_bid_sweep,
    exhaustive_greedy_check,
    fuzz,
    payment_sweep_check,
    random_campaign,
    wins_at,
)


def test_w1_matches_and_enumerates(w1):
    rep = exhaustive_greedy_check(w1)
    assert rep.passed
    assert rep.info["optimal_cr"] == 1.0
    assert rep.info["optimal_subsets"] == [(1, 2), (1, 3)]


def test_w2_greedy_below_optimum(w2):
    rep = exhaustive_greedy_check(w2)
    assert rep.passed
    assert rep.info["greedy_cr"] == 0.75
    assert rep.info["optimal_cr"] == 1.0


def test_unprofitable_single_bidder():
    c = Campaign([Task(1, 0, 0, 2.0)], [Participant(1, 0, 0, 30, (1,), 3.0, {1: 1.0})], "reputation_unaware")
    rep = exhaustive_greedy_check(c)
    assert rep.passed and rep.info["greedy_cr"] == 0.0


def test_sole_bidder_sweep_is_value_bound():
    c = Campaign([Task(1, 0, 0, 4.0)], [Participant(1, 0, 0, 30, (1,), 1.0, {1: 1.0})], "reputation_unaware")
    assert critical_bid_sweep(c, 1) == pytest.approx(4.0 - 1e-3)
    rep = payment_sweep_check(c)
    assert rep.info["competitor_free"] == [1]
    assert rep.checks == {}


def test_sweep_rejects_loser(w1):
    with pytest.raises(ValueError):
        critical_bid_sweep(w1, 2)


def test_size_limit():
    rng = np.random.Generator(np.random.PCG64(0))
    tasks = [Task(1, 0, 0, 3.0)]
    parts = [Participant(i, 0, 0, 30, (1,), 1.0, {1: 1.0}) for i in range(1, 14)]
    with pytest.raises(ValueError):
        exhaustive_greedy_check(Campaign(tasks, parts, "reputation_unaware"))
    assert random_campaign(rng).n_participants <= 8


def test_sweep_monotone_on_grid():
    rng = np.random.Generator(np.random.PCG64(123))
    checked = 0
    while checked < 15:
        c = random_campaign(rng, 6, 6)
        r = run_primary(c)
        for i in r.winners:
            crit = critical_bid_sweep(c, i)
            for b in np.arange(0.01, crit, 0.01):
                assert wins_at(c, i, float(b))
            checked += 1


def test_report_is_json(w2):
    rep = exhaustive_greedy_check(w2)
    payload = json.loads(rep.to_text())
    assert payload["passed"] is True and len(payload["digest"]) == 16


def test_small_fuzz_passes():
    reports = fuzz(100, seed=99)
    assert all(r.passed for r in reports), [r.to_text() for r in reports if not r.passed][:3]
