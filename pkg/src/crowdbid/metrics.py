"""Clearance rate and user-utility accounting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .domain import Campaign, sum_descriptive_bids
from .greedy import PrimaryResult
from .pertask import PerTaskOutcome
from .twostage import TwoStageOutcome

Outcome = Union[PrimaryResult, TwoStageOutcome, PerTaskOutcome]


@dataclass(frozen=True)
class AuctionMetrics:
    clearance_rate: float
    primary_utils: Mapping[int, float]
    secondary_utils: Mapping[int, float]
    overall_utility: float
    avg_user_utility: float
    total_payments: float
    n_primary: int
    n_secondary: int


def clearance_rate(outcome: Outcome, n_tasks: int) -> float:
    """Fraction of the campaign's tasks that end up covered."""
    if n_tasks <= 0:
        raise ValueError("clearance rate needs at least one task")
    return len(outcome.covered_final) / n_tasks


def primary_utility(payment: float, cost: float) -> float:
    return payment - cost


def secondary_utility(payment: float, collective_bid: float, is_winner: bool = True) -> float:
    """Utility of a winner paid by its per-task bids.

    The cost is the collective bid when the payment reaches it; otherwise the
    cost equals the payment and the utility is zero.
    """
    if not is_winner:
        return 0.0
    cost = collective_bid if payment >= collective_bid else payment
    return payment - cost if payment > cost else 0.0


def overall_and_average(
    primary_utils: Mapping[int, float], secondary_utils: Mapping[int, float]
) -> tuple[float, float]:
    """Sum of all utilities, and the per-class mean utilities added together.

    An empty winner class contributes 0 to the average.
    """
    up = sum(primary_utils.values())
    us = sum(secondary_utils.values())
    avg = (up / len(primary_utils) if primary_utils else 0.0) + (
        us / len(secondary_utils) if secondary_utils else 0.0
    )
    return up + us, avg


def evaluate(outcome: Outcome, c: Campaign) -> AuctionMetrics:
    """All per-auction metrics for any mechanism's outcome.

    PTB winners are booked as primary winners; their cost is the per-task
    bids over the tasks they were assigned.
    """
    if isinstance(outcome, TwoStageOutcome):
        prim = outcome.primary
        secondary = {
            j: secondary_utility(outcome.secondary_payments[j], c.participant(j).collective_bid)
            for j in outcome.secondary_winners
        }
    elif isinstance(outcome, PrimaryResult):
        prim = outcome
        secondary = {}
    elif isinstance(outcome, PerTaskOutcome):
        primary = {
            i: primary_utility(
                outcome.payments[i], sum_descriptive_bids(c.participant(i), outcome.assignments[i])
            )
            for i in outcome.winners
        }
        return _assemble(outcome, c, primary, {})
    else:
        raise TypeError(f"unsupported outcome type {type(outcome).__name__}")
    primary = {i: primary_utility(prim.payments[i], c.participant(i).private_cost) for i in prim.winners}
    return _assemble(outcome, c, primary, secondary)


def _assemble(outcome: Outcome, c: Campaign, primary, secondary) -> AuctionMetrics:
    overall, avg = overall_and_average(primary, secondary)
    return AuctionMetrics(
        clearance_rate=clearance_rate(outcome, c.n_tasks),
        primary_utils=primary,
        secondary_utils=secondary,
        overall_utility=overall,
        avg_user_utility=avg,
        total_payments=outcome.total_payment,
        n_primary=len(primary),
        n_secondary=len(secondary),
    )
