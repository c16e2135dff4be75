"""Stage-one greedy winner selection and critical payments.

With a reputation-aware campaign this is TSCM; with a reputation-unaware one
it is Msensing. The same engine also drives the descriptive-bid greedy used
by the secondary stage of 2SB and by PTB.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .domain import Campaign, Mode, Participant, marginal_value

__all__ = [
    "PrimaryResult",
    "select_primary",
    "compute_payments",
    "run_primary",
    "msensing",
    "tscm",
]


def reputation_of(c: Campaign, p: Participant) -> float:
    return p.reputation if c.mode.aware else 1.0


class GreedyState:
    """Incremental argmax over ``value - ask`` for a pool of participants.

    ``value`` is the reputation-weighted value of a participant's still
    uncovered tasks. ``ask`` is ``b / R`` for collective bids, or the per-task
    bids over the uncovered tasks divided by ``R`` when ``descriptive``.
    Ties go to the smaller ask, then to the lower id. With descriptive bids a
    participant whose uncovered set is empty is never returned.
    """

    def __init__(
        self,
        c: Campaign,
        pool: Iterable[int],
        descriptive: bool = False,
        covered: Iterable[int] = (),
    ):
        self.c = c
        self.descriptive = descriptive
        self.covered: set[int] = set(covered)
        self.removed: set[int] = set()
        self.live: dict[int, list[int]] = {}
        self.by_task: dict[int, list[int]] = {}
        self.current: dict[int, tuple[float, float]] = {}
        self.version: dict[int, int] = {}
        self.heap: list[tuple[float, float, int, int]] = []
        for pid in pool:
            live = [j for j in c.participant(pid).interested_tasks if j not in self.covered]
            self.live[pid] = live
            for j in live:
                self.by_task.setdefault(j, []).append(pid)
            self.version[pid] = 0
            value, ask = self._evaluate(pid)
            self.current[pid] = (value, ask)
            self.heap.append((ask - value, ask, pid, 0))
        heapq.heapify(self.heap)

    def _evaluate(self, pid: int) -> tuple[float, float]:
        p = self.c.participant(pid)
        r = reputation_of(self.c, p)
        vals = self.c.values
        total = 0.0
        for j in self.live[pid]:
            total += vals[j]
        value = r * total if self.c.mode.aware else total
        if self.descriptive:
            bids = 0.0
            for j in self.live[pid]:
                bids += p.descriptive_bids[j]
            ask = bids / r
        else:
            ask = p.collective_bid / r
        return value, ask

    def copy(self) -> "GreedyState":
        other = object.__new__(GreedyState)
        other.c = self.c
        other.descriptive = self.descriptive
        other.covered = set(self.covered)
        other.removed = set(self.removed)
        other.live = {k: list(v) for k, v in self.live.items()}
        other.by_task = self.by_task
        other.current = dict(self.current)
        other.version = dict(self.version)
        other.heap = list(self.heap)
        return other

    def copy_without(self, pid: int) -> "GreedyState":
        """Copy of this state with ``pid`` taken out of the pool."""
        other = self.copy()
        other.removed.add(pid)
        return other

    def peek(self) -> tuple[int, float, float] | None:
        """Best remaining candidate as ``(id, value, ask)``, or None."""
        heap = self.heap
        while heap:
            _, _, pid, ver = heap[0]
            if pid in self.removed or ver != self.version[pid] or (
                self.descriptive and not self.live[pid]
            ):
                heapq.heappop(heap)
                continue
            value, ask = self.current[pid]
            return pid, value, ask
        return None

    def take(self, pid: int) -> frozenset[int]:
        """Remove ``pid`` from the pool and cover its tasks; returns the newly covered ones."""
        self.removed.add(pid)
        new = [j for j in self.live[pid] if j not in self.covered]
        self.covered.update(new)
        dirty = set()
        for j in new:
            for q in self.by_task.get(j, ()):
                if q in self.removed:
                    continue
                self.live[q].remove(j)
                dirty.add(q)
        for q in sorted(dirty):
            self.version[q] += 1
            value, ask = self._evaluate(q)
            self.current[q] = (value, ask)
            heapq.heappush(self.heap, (ask - value, ask, q, self.version[q]))
        return frozenset(new)

    def value_of(self, pid: int) -> float:
        """Current marginal value of any participant, pooled or not."""
        return marginal_value(self.c.participant(pid), self.covered, self.c.values, self.c.mode.aware)


@dataclass(frozen=True)
class PrimaryResult:
    """Stage-one outcome.

    ``payments`` has an entry for every participant (zero for losers).
    ``examined`` counts, per winner, how many competitors the payment loop
    looked at; zero marks the competitor-free edge case whose payment is 0.
    ``admissions`` records ``(id, value, ask)`` at each admission.
    """

    winners: tuple[int, ...]
    covered: frozenset[int]
    payments: Mapping[int, float]
    total_payment: float
    examined: Mapping[int, int] = field(default_factory=dict)
    admissions: tuple[tuple[int, float, float], ...] = ()

    @property
    def covered_final(self) -> frozenset[int]:
        return self.covered


def _run_selection(state: GreedyState) -> list[tuple[int, float, float, frozenset[int]]]:
    picks = []
    while True:
        top = state.peek()
        if top is None:
            break
        h, value, ask = top
        if not ask < value:
            break
        live = frozenset(state.live[h])
        state.take(h)
        picks.append((h, value, ask, live))
    return picks


def select_primary(c: Campaign) -> tuple[list[int], frozenset[int]]:
    """Greedy stage one: admit the best ``V^R(S) - b/R`` while it is positive."""
    state = GreedyState(c, (p.id for p in c.participants))
    picks = _run_selection(state)
    return [h for h, *_ in picks], frozenset(state.covered)


def critical_payment(base: GreedyState, i: int) -> tuple[float, int]:
    """Critical payment of winner ``i`` against the greedy run without ``i``.

    ``base`` is the untouched starting state of the mechanism (it must
    contain ``i``). Returns the payment and the number of competitors
    examined. When every competitor is admitted before the loop runs out,
    the stage after the last one is also scored, so the result is the
    largest ask at which ``i`` would still be selected.
    """
    state = base.copy_without(i)
    pay = 0.0
    examined = 0
    admissible = False
    while True:
        top = state.peek()
        if top is None:
            break
        q, vq, aq = top
        vi = state.value_of(i)
        pay = max(pay, min((vi - vq) + aq, vi))
        examined += 1
        admissible = aq < vq
        state.take(q)
        if not admissible:
            break
    if examined and admissible:
        pay = max(pay, state.value_of(i))
    return pay, examined


def compute_payments(c: Campaign, winners: Iterable[int]) -> dict[int, float]:
    """Critical payment per participant (zero for non-winners)."""
    payments, _ = _payments(c, list(winners))
    return payments


def _payments(c: Campaign, winners: list[int]) -> tuple[dict[int, float], dict[int, int]]:
    ids = {p.id for p in c.participants}
    bad = [w for w in winners if w not in ids]
    if bad:
        raise ValueError(f"winners {bad} are not participants of the campaign")
    payments = {p.id: 0.0 for p in c.participants}
    examined = {}
    if winners:
        base = GreedyState(c, sorted(ids))
        for i in winners:
            payments[i], examined[i] = critical_payment(base, i)
    return payments, examined


def run_primary(c: Campaign) -> PrimaryResult:
    """Stage one in full: selection plus critical payments."""
    state = GreedyState(c, (p.id for p in c.participants))
    picks = _run_selection(state)
    winners = [h for h, *_ in picks]
    payments, examined = _payments(c, winners)
    return PrimaryResult(
        winners=tuple(winners),
        covered=frozenset(state.covered),
        payments=payments,
        total_payment=sum(payments[w] for w in winners),
        examined=examined,
        admissions=tuple((h, v, a) for h, v, a, _ in picks),
    )


def msensing(c: Campaign) -> PrimaryResult:
    """Reputation-unaware stage one."""
    return run_primary(c.with_mode(Mode.REPUTATION_UNAWARE))


def tscm(c: Campaign) -> PrimaryResult:
    """Reputation-aware stage one."""
    return run_primary(c.with_mode(Mode.REPUTATION_AWARE))
