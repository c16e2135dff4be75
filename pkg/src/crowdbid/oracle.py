"""Brute-force checks for tiny campaigns.

Everything here recomputes from scratch on every step (no incremental
state) so it can be compared against the fast greedy in :mod:`greedy`.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .domain import BID_FLOOR, Campaign, Mode, Participant, Task, marginal_value
from .greedy import run_primary

MAX_ORACLE_N = 12
SWEEP_STEP = 1e-3
SWEEP_TOL = 1e-2
_COARSE = 0.05


@dataclass
class OracleReport:
    digest: str
    checks: dict[str, bool] = field(default_factory=dict)
    counterexample: dict[str, Any] | None = None
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_text(self) -> str:
        payload = {
            "digest": self.digest,
            "passed": self.passed,
            "checks": self.checks,
            "info": self.info,
        }
        if self.counterexample is not None:
            payload["counterexample"] = self.counterexample
        return json.dumps(payload, sort_keys=True, default=_jsonable)


def _jsonable(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, Mode):
        return o.value
    raise TypeError(type(o).__name__)


def campaign_digest(c: Campaign) -> str:
    blob = json.dumps(
        {
            "mode": c.mode.value,
            "tasks": [(t.id, t.value) for t in c.tasks],
            "participants": [
                (p.id, p.interested_tasks, p.collective_bid, sorted(p.descriptive_bids.items()), p.reputation)
                for p in c.participants
            ],
        }
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _rep(c: Campaign, p: Participant) -> float:
    return p.reputation if c.mode.aware else 1.0


def _argmax(c: Campaign, pool, covered):
    """Best of ``pool`` by rescanning: score, then smaller ask, then lower id."""
    best = None
    for pid in sorted(pool):
        p = c.participant(pid)
        v = marginal_value(p, covered, c.values, c.mode.aware)
        a = p.collective_bid / _rep(c, p)
        key = (a - v, a, pid)
        if best is None or key < best[0]:
            best = (key, pid, v, a)
    return best[1:]


def naive_select(c: Campaign) -> tuple[list[int], set[int]]:
    winners: list[int] = []
    covered: set[int] = set()
    pool = {p.id for p in c.participants}
    while pool:
        h, v, a = _argmax(c, pool, covered)
        if not a < v:
            break
        winners.append(h)
        pool.discard(h)
        covered |= set(c.participant(h).interested_tasks)
    return winners, covered


def naive_payment(c: Campaign, i: int) -> tuple[float, int]:
    pi = c.participant(i)
    pool = {p.id for p in c.participants} - {i}
    covered: set[int] = set()
    pay, examined, admissible = 0.0, 0, False
    while pool:
        q, vq, aq = _argmax(c, pool, covered)
        vi = marginal_value(pi, covered, c.values, c.mode.aware)
        pay = max(pay, min((vi - vq) + aq, vi))
        examined += 1
        admissible = aq < vq
        pool.discard(q)
        covered |= set(c.participant(q).interested_tasks)
        if not admissible:
            break
    if examined and admissible:
        pay = max(pay, marginal_value(pi, covered, c.values, c.mode.aware))
    return pay, examined


def best_coverage_subsets(c: Campaign) -> tuple[float, list[tuple[int, ...]]]:
    """Largest clearance rate any set of participants reaches, with the smallest sets reaching it."""
    ids = [p.id for p in c.participants]
    best, sets = 0.0, []
    for k in range(1, len(ids) + 1):
        for combo in itertools.combinations(ids, k):
            cov = set()
            for pid in combo:
                cov.update(c.participant(pid).interested_tasks)
            cr = len(cov) / c.n_tasks
            if cr > best:
                best, sets = cr, [combo]
            elif cr == best and sets and len(sets[0]) == k:
                sets.append(combo)
    return best, sets


def _check_size(c: Campaign):
    if c.n_participants > MAX_ORACLE_N:
        raise ValueError(f"oracle limited to {MAX_ORACLE_N} participants, got {c.n_participants}")


def exhaustive_greedy_check(c: Campaign, enumerate_optimum: bool = True) -> OracleReport:
    """Compare the fast stage one against the naive rescan, exactly."""
    _check_size(c)
    fast = run_primary(c)
    winners, covered = naive_select(c)
    payments = {p.id: 0.0 for p in c.participants}
    for i in winners:
        payments[i], _ = naive_payment(c, i)
    report = OracleReport(campaign_digest(c))
    report.checks["winner_order"] = list(fast.winners) == winners
    report.checks["coverage"] = set(fast.covered) == covered
    report.checks["payments"] = dict(fast.payments) == payments
    report.info["greedy_cr"] = len(covered) / c.n_tasks if c.n_tasks else 0.0
    if enumerate_optimum:
        best, sets = best_coverage_subsets(c)
        report.info["optimal_cr"] = best
        report.info["optimal_subsets"] = sets
    if not report.passed:
        report.counterexample = {
            "fast": {"winners": fast.winners, "covered": fast.covered, "payments": dict(fast.payments)},
            "naive": {"winners": winners, "covered": covered, "payments": payments},
        }
    return report


def _with_bid(c: Campaign, pid: int, bid: float) -> Campaign:
    parts = list(c.participants)
    parts[pid - 1] = replace(parts[pid - 1], collective_bid=bid, private_cost=bid)
    return Campaign(c.tasks, parts, c.mode)


def wins_at(c: Campaign, pid: int, bid: float) -> bool:
    winners, _ = naive_select(_with_bid(c, pid, bid))
    return pid in winners


def critical_bid_sweep(c: Campaign, winner: int, step: float = SWEEP_STEP) -> float:
    """Largest collective bid on the ``step`` grid at which ``winner`` still wins.

    Raises the bid from its submitted value in coarse increments until the
    winner first loses, then refines the last interval on the fine grid.
    """
    _check_size(c)
    p = c.participant(winner)
    if not wins_at(c, winner, p.collective_bid):
        raise ValueError(f"participant {winner} does not win at its own bid")
    ratio = round(_COARSE / step)
    k = math.floor(p.collective_bid / step)
    # no bid at or above R * V^R(empty) can be admitted
    ceiling = _rep(c, p) * marginal_value(p, (), c.values, c.mode.aware)
    last = k
    while (k + ratio) * step <= ceiling + _COARSE and wins_at(c, winner, (k + ratio) * step):
        k += ratio
        last = k
    for m in range(k + 1, k + ratio):
        if not wins_at(c, winner, m * step):
            break
        last = m
    return last * step


def random_campaign(
    rng: np.random.Generator,
    max_n: int = 8,
    max_m: int = 8,
    mode: Mode | str = Mode.REPUTATION_AWARE,
    p_interest: float = 0.35,
) -> Campaign:
    """Small non-spatial campaign with random interest sets, for fuzzing."""
    mode = Mode(mode)
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(1, max_n + 1))
    tasks = [Task(j, 0.0, 0.0, float(rng.uniform(1, 5))) for j in range(1, m + 1)]
    parts = []
    for i in range(1, n + 1):
        mask = rng.random(m) < p_interest
        if not mask.any():
            mask[rng.integers(m)] = True
        interested = tuple(int(j) + 1 for j in np.flatnonzero(mask))
        rep = float(rng.uniform(0.6, 0.9))
        bid = float(rng.uniform(1, 10))
        desc = {
            j: float(rng.uniform(max(BID_FLOOR, tasks[j - 1].value - 2), tasks[j - 1].value + 2))
            for j in interested
        }
        parts.append(Participant(i, 0.0, 0.0, 0.0, interested, bid, desc, rep if mode.aware else 1.0))
    return Campaign(tasks, parts, mode)


def payment_sweep_check(c: Campaign) -> OracleReport:
    """Compare every winner's payment with its swept critical bid.

    The computed payment is in normalized units (bid over reputation), so
    the swept raw bid is compared against ``R * payment``. Winners whose
    payment loop examined no competitor are listed, not asserted.
    """
    _check_size(c)
    fast = run_primary(c)
    report = OracleReport(campaign_digest(c))
    skipped, worst = [], 0.0
    for i in fast.winners:
        if fast.examined.get(i, 0) == 0:
            skipped.append(i)
            continue
        swept = critical_bid_sweep(c, i)
        expected = _rep(c, c.participant(i)) * fast.payments[i]
        err = abs(swept - expected)
        worst = max(worst, err)
        report.checks[f"payment_{i}"] = err <= SWEEP_TOL
        if err > SWEEP_TOL and report.counterexample is None:
            report.counterexample = {"winner": i, "swept": swept, "critical": expected}
    report.info["competitor_free"] = skipped
    report.info["max_error"] = worst
    return report


def fuzz(
    n_instances: int, max_n: int = 8, max_m: int = 8, seed: int = 0, sweep: bool = True
) -> list[OracleReport]:
    """Oracle reports over ``n_instances`` random campaigns, alternating RA and RU."""
    rng = np.random.Generator(np.random.PCG64(seed))
    reports = []
    for k in range(n_instances):
        mode = Mode.REPUTATION_AWARE if k % 2 == 0 else Mode.REPUTATION_UNAWARE
        c = random_campaign(rng, max_n, max_m, mode)
        rep = exhaustive_greedy_check(c, enumerate_optimum=False)
        if sweep:
            sw = payment_sweep_check(c)
            rep.checks.update(sw.checks)
            rep.info.update(sw.info)
            rep.counterexample = rep.counterexample or sw.counterexample
        reports.append(rep)
    return reports
