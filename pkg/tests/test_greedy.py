import pytest

from crowdbid.domain import Campaign, Mode, Participant, Task
from crowdbid.greedy import compute_payments, msensing, run_primary, select_primary, tscm
from crowdbid.oracle import critical_bid_sweep


def test_select_w1(w1):
    winners, covered = select_primary(w1)
    assert winners == [1, 3]
    assert covered == {1, 2, 3}


def test_select_w2(w2):
    winners, covered = select_primary(w2)
    assert winners == [1, 3]
    assert covered == {1, 2, 3}


def test_nobody_profitable():
    tasks = [Task(1, 0, 0, 2.0)]
    c = Campaign(tasks, [Participant(1, 0, 0, 30, (1,), 2.0, {1: 1.0}, 1.0)], Mode.REPUTATION_UNAWARE)
    assert select_primary(c) == ([], frozenset())
    r = run_primary(c)
    assert r.winners == () and r.total_payment == 0


def test_payments_w1(w1):
    pay = compute_payments(w1, [1, 3])
    assert pay == {1: 6.0, 2: 0.0, 3: 3.0}


@pytest.mark.parametrize("winner, expected", [(1, 6.0), (3, 3.0)])
def test_payments_w1_match_sweep(w1, winner, expected):
    assert abs(critical_bid_sweep(w1, winner) - expected) <= 1e-2


def test_competitor_free_winner_is_paid_nothing():
    tasks = [Task(1, 0, 0, 4.0)]
    c = Campaign(tasks, [Participant(1, 0, 0, 30, (1,), 1.0, {1: 1.0})], Mode.REPUTATION_UNAWARE)
    r = run_primary(c)
    assert r.winners == (1,)
    assert r.payments[1] == 0.0
    assert r.examined[1] == 0


def test_compute_payments_rejects_strangers(w1):
    with pytest.raises(ValueError):
        compute_payments(w1, [7])


def test_primary_result_bookkeeping(w2):
    r = run_primary(w2)
    assert r.total_payment == 9.0
    assert all(v == 0 for k, v in r.payments.items() if k not in r.winners)
    assert set(r.covered) == set().union(*(w2.participant(w).interested_tasks for w in r.winners))
    for h, value, ask in r.admissions:
        assert ask < value


def test_ra_with_unit_reputation_equals_ru(w2):
    ra = run_primary(w2.with_mode(Mode.REPUTATION_AWARE))
    ru = run_primary(w2)
    assert ra.winners == ru.winners and ra.payments == ru.payments


def test_reputation_scales_argmax():
    # same value and bid, lower reputation loses the tie-free comparison
    tasks = [Task(1, 0, 0, 5.0), Task(2, 0, 0, 5.0)]
    parts = [
        Participant(1, 0, 0, 30, (1,), 1.0, {1: 1.0}, 0.6),
        Participant(2, 0, 0, 30, (2,), 1.0, {2: 1.0}, 0.9),
    ]
    c = Campaign(tasks, parts, Mode.REPUTATION_AWARE)
    assert tscm(c).winners == (2, 1)
    assert msensing(c).winners == (1, 2)


def test_tie_prefers_cheaper_ask_then_lower_id():
    tasks = [Task(1, 0, 0, 6.0), Task(2, 0, 0, 3.0), Task(3, 0, 0, 3.0)]
    parts = [
        Participant(1, 0, 0, 30, (1,), 5.0, {1: 1.0}),  # 6 - 5 = 1
        Participant(2, 0, 0, 30, (2,), 2.0, {2: 1.0}),  # 3 - 2 = 1, cheaper
        Participant(3, 0, 0, 30, (3,), 2.0, {3: 1.0}),  # same as 2, higher id
    ]
    c = Campaign(tasks, parts, Mode.REPUTATION_UNAWARE)
    assert select_primary(c)[0] == [2, 3, 1]
