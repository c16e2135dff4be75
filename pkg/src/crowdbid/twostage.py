"""Two-stage bidding (2SB).

Stage one is the collective-bid greedy with critical payments. Whatever
budget is left over (total task value minus stage-one payments) then buys
coverage of the remaining tasks from the losers through their per-task bids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .domain import Campaign, sum_descriptive_bids
from .greedy import GreedyState, PrimaryResult, reputation_of, run_primary

ReputationPolicy = Callable[[int, "TwoStageOutcome"], float]


@dataclass(frozen=True)
class TwoStageOutcome:
    primary: PrimaryResult
    secondary_winners: tuple[int, ...]
    secondary_assignments: Mapping[int, frozenset[int]]
    secondary_payments: Mapping[int, float]
    budget_trace: tuple[float, ...]
    covered_final: frozenset[int]
    reputations: Mapping[int, float] = field(default_factory=dict)

    @property
    def total_payment(self) -> float:
        return self.primary.total_payment + sum(self.secondary_payments.values())


def compute_budget(c: Campaign, primary: PrimaryResult) -> float:
    """Residual budget: total task value minus the stage-one payments. May be negative."""
    return c.total_value - primary.total_payment


def identity_policy(pid: int, outcome: TwoStageOutcome) -> float:
    return outcome.reputations[pid]


def reputation_hook(
    outcome: TwoStageOutcome, c: Campaign, policy: ReputationPolicy | None = None
) -> dict[int, float]:
    """Post-auction reputation update for every winner.

    No outlier detection or update rule is built in; ``policy`` receives
    each winner id (primary and secondary) with the outcome, whose
    ``reputations`` field holds the current values, and returns the new
    reputation. The default leaves reputations untouched.
    """
    reps = {p.id: p.reputation for p in c.participants}
    if policy is None:
        return reps
    current = outcome if outcome.reputations else _with_reputations(outcome, reps)
    updated = dict(reps)
    for s in (*outcome.primary.winners, *outcome.secondary_winners):
        r = float(policy(s, current))
        if not 0 < r <= 1:
            raise ValueError(f"policy returned reputation {r} for participant {s}; must be in (0, 1]")
        updated[s] = r
    return updated


def _with_reputations(outcome: TwoStageOutcome, reps: Mapping[int, float]) -> TwoStageOutcome:
    return TwoStageOutcome(
        outcome.primary,
        outcome.secondary_winners,
        outcome.secondary_assignments,
        outcome.secondary_payments,
        outcome.budget_trace,
        outcome.covered_final,
        dict(reps),
    )


def run_2sb(c: Campaign, policy: ReputationPolicy | None = None) -> TwoStageOutcome:
    primary = run_primary(c)
    budget = compute_budget(c, primary)
    trace = [budget]
    winners: list[int] = []
    assignments: dict[int, frozenset[int]] = {}
    payments: dict[int, float] = {}
    covered = set(primary.covered)

    if len(covered) < c.n_tasks:
        selected = set(primary.winners)
        pool = [
            p.id
            for p in c.participants
            if p.id not in selected and any(j not in covered for j in p.interested_tasks)
        ]
        state = GreedyState(c, pool, descriptive=True, covered=covered)
        while len(state.covered) < c.n_tasks:
            top = state.peek()
            if top is None:
                break
            h, _, _ = top
            p = c.participant(h)
            r = reputation_of(c, p)
            tasks = frozenset(state.live[h])
            bid = sum_descriptive_bids(p, tasks)
            after = (budget * r) - bid / r
            # admit only while the budget stays nonnegative after the debit
            if after < 0:
                break
            state.take(h)
            winners.append(h)
            assignments[h] = tasks
            payments[h] = bid
            budget = after
            trace.append(budget)
        covered = state.covered

    outcome = TwoStageOutcome(
        primary=primary,
        secondary_winners=tuple(winners),
        secondary_assignments=assignments,
        secondary_payments=payments,
        budget_trace=tuple(trace),
        covered_final=frozenset(covered),
        reputations={p.id: p.reputation for p in c.participants},
    )
    reps = reputation_hook(outcome, c, policy)
    return _with_reputations(outcome, reps)
