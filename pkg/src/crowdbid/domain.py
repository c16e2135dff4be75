"""Campaign data model, spatial generation and bid arithmetic."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

# floor applied to the lower end of the per-task bid interval
BID_FLOOR = 0.01


class Mode(str, enum.Enum):
    REPUTATION_AWARE = "reputation_aware"
    REPUTATION_UNAWARE = "reputation_unaware"

    @property
    def aware(self) -> bool:
        return self is Mode.REPUTATION_AWARE


class EmptyInterest(str, enum.Enum):
    """What the generator does with a phone that has no task in range."""

    RELOCATE = "relocate"
    DROP = "drop"


@dataclass(frozen=True)
class Task:
    id: int
    x: float
    y: float
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"task {self.id}: value must be positive, got {self.value}")


@dataclass(frozen=True)
class Participant:
    id: int
    x: float
    y: float
    radius: float
    interested_tasks: tuple[int, ...]
    collective_bid: float
    descriptive_bids: Mapping[int, float]
    reputation: float = 1.0
    private_cost: float | None = None

    def __post_init__(self):
        tasks = tuple(sorted(self.interested_tasks))
        if not tasks:
            raise ValueError(f"participant {self.id} must bid on at least one task")
        if len(set(tasks)) != len(tasks):
            raise ValueError(f"participant {self.id}: duplicate interested tasks")
        if set(self.descriptive_bids) != set(tasks):
            raise ValueError(
                f"participant {self.id}: descriptive bids must cover exactly the interested tasks"
            )
        if any(not b > 0 for b in self.descriptive_bids.values()):
            raise ValueError(f"participant {self.id}: descriptive bids must be positive")
        if not self.collective_bid > 0:
            raise ValueError(f"participant {self.id}: collective bid must be positive")
        if not 0 < self.reputation <= 1:
            raise ValueError(f"participant {self.id}: reputation must lie in (0, 1]")
        object.__setattr__(self, "interested_tasks", tasks)
        object.__setattr__(
            self, "descriptive_bids", MappingProxyType({j: float(self.descriptive_bids[j]) for j in tasks})
        )
        if self.private_cost is None:
            # truthful bidding: the collective bid is the private cost
            object.__setattr__(self, "private_cost", self.collective_bid)

    @property
    def normalized_bid(self) -> float:
        """Collective bid divided by reputation, ``b / R``."""
        return self.collective_bid / self.reputation


@dataclass(frozen=True)
class Campaign:
    tasks: tuple[Task, ...]
    participants: tuple[Participant, ...]
    mode: Mode = Mode.REPUTATION_AWARE
    values: Mapping[int, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "participants", tuple(self.participants))
        object.__setattr__(self, "mode", Mode(self.mode))
        task_ids = [t.id for t in self.tasks]
        if task_ids != list(range(1, len(task_ids) + 1)):
            raise ValueError("task ids must be 1..M in order")
        pids = [p.id for p in self.participants]
        if pids != list(range(1, len(pids) + 1)):
            raise ValueError("participant ids must be 1..N in order")
        for p in self.participants:
            if p.interested_tasks[-1] > len(task_ids) or p.interested_tasks[0] < 1:
                raise ValueError(f"participant {p.id} references an unknown task")
            if not self.mode.aware and p.reputation != 1.0:
                raise ValueError("reputation-unaware campaigns require every reputation to be 1")
        object.__setattr__(self, "values", MappingProxyType({t.id: t.value for t in self.tasks}))

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def n_participants(self) -> int:
        return len(self.participants)

    @property
    def total_value(self) -> float:
        """Sum of all task values."""
        return sum(t.value for t in self.tasks)

    @property
    def task_ids(self) -> frozenset[int]:
        return frozenset(self.values)

    def participant(self, pid: int) -> Participant:
        return self.participants[pid - 1]

    def with_mode(self, mode: Mode | str) -> "Campaign":
        """Same campaign under another mode; RU forces every reputation to 1."""
        mode = Mode(mode)
        if mode.aware:
            return Campaign(self.tasks, self.participants, mode)
        parts = [_replace_reputation(p, 1.0) for p in self.participants]
        return Campaign(self.tasks, parts, mode)


def _replace_reputation(p: Participant, r: float) -> Participant:
    return Participant(
        p.id, p.x, p.y, p.radius, p.interested_tasks, p.collective_bid,
        dict(p.descriptive_bids), r, p.private_cost,
    )


def _check_range(name: str, rng: Sequence[float]) -> tuple[float, float]:
    lo, hi = (float(v) for v in rng)
    if not (0 < lo <= hi):
        raise ValueError(f"{name} must satisfy 0 < lo <= hi, got [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True)
class GenConfig:
    """Parameters of a random campaign.

    Defaults are the simulation settings of the reproduced study: a 1 km
    square, 30 m interest radius, task values in [1, 5], collective bids in
    [1, 10], per-task bids within ``alpha = 2`` of the task value and
    reputations in [0.6, 0.9].

    ``n_participants`` counts phones placed in the area. By default a phone
    with no task within ``interest_radius`` does not enter the auction
    (``empty_interest="drop"``); ``"relocate"`` instead redraws its position
    until some task is in range, so the campaign keeps exactly
    ``n_participants`` bidders.
    """

    n_tasks: int = 100
    n_participants: int = 100
    area_side: float = 1000.0
    interest_radius: float = 30.0
    value_range: tuple[float, float] = (1.0, 5.0)
    collective_bid_range: tuple[float, float] = (1.0, 10.0)
    alpha: float = 2.0
    reputation_range: tuple[float, float] = (0.6, 0.9)
    seed: int = 0
    mode: Mode = Mode.REPUTATION_AWARE
    empty_interest: EmptyInterest = EmptyInterest.DROP

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "empty_interest", EmptyInterest(self.empty_interest))
        object.__setattr__(self, "value_range", _check_range("value_range", self.value_range))
        object.__setattr__(
            self, "collective_bid_range", _check_range("collective_bid_range", self.collective_bid_range)
        )
        object.__setattr__(
            self, "reputation_range", _check_range("reputation_range", self.reputation_range)
        )
        if self.reputation_range[1] > 1:
            raise ValueError("reputations cannot exceed 1")
        if self.n_tasks < 1 or self.n_participants < 1:
            raise ValueError("need at least one task and one participant")
        if not self.area_side > 0:
            raise ValueError("area_side must be positive")
        if not self.interest_radius > 0:
            raise ValueError("interest_radius must be positive (otherwise relocation never ends)")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream for ``seed``; the generator behind every campaign."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def generate_campaign(cfg: GenConfig) -> Campaign:
    """Draw a random campaign.

    Draw order is fixed so the stream is reproducible: per task ``x, y,
    value``; then per participant ``x, y`` (redrawn while no task lies in
    range under the relocate policy), ``reputation``, ``collective bid`` and
    one per-task bid for each interested task in ascending task id. The
    reputation is drawn in both modes and replaced by 1 when reputation
    unaware, so RA and RU campaigns built from one seed share everything else.
    """
    rng = make_rng(cfg.seed)
    side = cfg.area_side

    def uniform(lo: float, hi: float) -> float:
        return lo + (hi - lo) * rng.random()

    tx = np.empty(cfg.n_tasks)
    ty = np.empty(cfg.n_tasks)
    tasks = []
    for k in range(cfg.n_tasks):
        tx[k] = side * rng.random()
        ty[k] = side * rng.random()
        tasks.append(Task(k + 1, float(tx[k]), float(ty[k]), uniform(*cfg.value_range)))

    r2 = cfg.interest_radius**2
    participants = []
    for _ in range(cfg.n_participants):
        while True:
            px, py = side * rng.random(), side * rng.random()
            in_range = np.flatnonzero((tx - px) ** 2 + (ty - py) ** 2 <= r2)
            if in_range.size or cfg.empty_interest is EmptyInterest.DROP:
                break
        reputation = uniform(*cfg.reputation_range)
        bid = uniform(*cfg.collective_bid_range)
        if not in_range.size:
            # a phone with nothing in range never enters the auction
            continue
        interested = tuple(int(k) + 1 for k in in_range)
        desc = {}
        for j in interested:
            v = tasks[j - 1].value
            desc[j] = uniform(max(BID_FLOOR, v - cfg.alpha), v + cfg.alpha)
        participants.append(
            Participant(
                id=len(participants) + 1,
                x=px,
                y=py,
                radius=cfg.interest_radius,
                interested_tasks=interested,
                collective_bid=bid,
                descriptive_bids=desc,
                reputation=reputation if cfg.mode.aware else 1.0,
            )
        )
    return Campaign(tuple(tasks), tuple(participants), cfg.mode)


def sum_descriptive_bids(p: Participant, subset: Iterable[int]) -> float:
    """Sum of ``p``'s per-task bids over ``subset`` (all of ``T_i`` gives the full sum)."""
    total = 0.0
    for j in sorted(subset):
        try:
            total += p.descriptive_bids[j]
        except KeyError:
            raise ValueError(f"participant {p.id} did not bid on task {j}") from None
    return total


def marginal_value(
    p: Participant,
    covered: Iterable[int] | frozenset[int] | set[int],
    values: Mapping[int, float],
    reputation_aware: bool = True,
) -> float:
    """Reputation-weighted value of the tasks ``p`` would add on top of ``covered``.

    ``R_p * sum(V_j for j in T_p if j not in covered)``; ``R_p`` is taken as 1
    when ``reputation_aware`` is false.
    """
    covered = covered if isinstance(covered, (set, frozenset)) else set(covered)
    total = 0.0
    for j in p.interested_tasks:
        if j not in covered:
            total += values[j]
    return p.reputation * total if reputation_aware else total
