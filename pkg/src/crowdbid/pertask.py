"""Per-task bidding (PTB): the whole auction runs on descriptive bids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping

from .domain import Campaign, sum_descriptive_bids
from .greedy import GreedyState, critical_payment, reputation_of

Admission = Literal["budget", "utility"]
Payment = Literal["critical", "bid"]


@dataclass(frozen=True)
class PerTaskOutcome:
    winners: tuple[int, ...]
    assignments: Mapping[int, frozenset[int]]
    payments: Mapping[int, float]
    covered_final: frozenset[int]
    examined: Mapping[int, int]
    admissions: tuple[tuple[int, float, float], ...] = ()
    budget_trace: tuple[float, ...] = ()

    @property
    def total_payment(self) -> float:
        return sum(self.payments.values())


def run_ptb(
    c: Campaign,
    admission: Admission = "budget",
    payment: Payment | None = None,
) -> PerTaskOutcome:
    """Greedy over ``V^R(S) - B(S)/R`` where ``B(S)`` sums the bids on uncovered tasks.

    A winner gets exactly its uncovered tasks, so no task is assigned twice.

    admission
        ``"budget"`` funds the auction with the total task value and admits
        the best candidate while ``budget * R - B/R`` stays nonnegative,
        the same recursion as the secondary stage of 2SB. ``"utility"``
        admits while the best score is strictly positive and keeps no budget.
    payment
        ``"bid"`` pays the per-task bids of the assigned tasks;
        ``"critical"`` pays the largest normalized ask at which the winner
        would still have been picked (only meaningful under ``"utility"``).
        Defaults to ``"bid"`` for budget admission, ``"critical"`` otherwise.
    """
    if admission not in ("budget", "utility"):
        raise ValueError(f"unknown admission rule {admission!r}")
    if payment is None:
        payment = "bid" if admission == "budget" else "critical"
    if payment not in ("critical", "bid"):
        raise ValueError(f"unknown payment rule {payment!r}")
    if payment == "critical" and admission == "budget":
        raise ValueError("critical payments need utility admission")

    base = GreedyState(c, [p.id for p in c.participants], descriptive=True)
    state = base.copy()
    budget = c.total_value
    trace = [budget] if admission == "budget" else []
    winners = []
    assignments: dict[int, frozenset[int]] = {}
    admissions = []
    while True:
        top = state.peek()
        if top is None:
            break
        h, value, ask = top
        if admission == "utility":
            if not ask < value:
                break
        else:
            p = c.participant(h)
            r = reputation_of(c, p)
            after = (budget * r) - sum_descriptive_bids(p, state.live[h]) / r
            if after < 0:
                break
            budget = after
            trace.append(budget)
        assignments[h] = frozenset(state.live[h])
        state.take(h)
        winners.append(h)
        admissions.append((h, value, ask))

    payments: dict[int, float] = {}
    examined: dict[int, int] = {}
    for h in winners:
        if payment == "bid":
            payments[h] = sum_descriptive_bids(c.participant(h), assignments[h])
            examined[h] = 0
        else:
            payments[h], examined[h] = critical_payment(base, h)
    return PerTaskOutcome(
        winners=tuple(winners),
        assignments=assignments,
        payments=payments,
        covered_final=frozenset(state.covered),
        examined=examined,
        admissions=tuple(admissions),
        budget_trace=tuple(trace),
    )
