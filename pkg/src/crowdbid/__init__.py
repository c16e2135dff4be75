"""Reputation-aware reverse auctions for mobile crowdsensing task allocation."""

from .domain import (
    Campaign,
    EmptyInterest,
    GenConfig,
    Mode,
    Participant,
    Task,
    generate_campaign,
    marginal_value,
    sum_descriptive_bids,
)
from .greedy import PrimaryResult, compute_payments, msensing, run_primary, select_primary, tscm
from .harness import Scenario, ScenarioResult, compare_head_to_head, run_scenario
from .metrics import AuctionMetrics, evaluate
from .pertask import PerTaskOutcome, run_ptb
from .twostage import TwoStageOutcome, compute_budget, reputation_hook, run_2sb

__version__ = "0.1.0"
