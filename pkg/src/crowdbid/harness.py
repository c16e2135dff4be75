"""Monte-Carlo scenario runner, head-to-head comparisons and CSV output."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .domain import Campaign, GenConfig, Mode, generate_campaign
from .greedy import run_primary
from .metrics import evaluate
from .pertask import run_ptb
from .twostage import run_2sb

log = logging.getLogger(__name__)

CSV_HEADER = (
    "auction",
    "grid_axis",
    "grid_value",
    "seed",
    "cr",
    "avg_user_utility",
    "n_primary",
    "n_secondary",
    "total_payment",
)
AXES = ("tasks", "participants", "auctions")


@dataclass(frozen=True)
class MechanismSpec:
    mode: Mode
    run: Callable


MECHANISMS: dict[str, MechanismSpec] = {
    "msensing": MechanismSpec(Mode.REPUTATION_UNAWARE, run_primary),
    "tscm": MechanismSpec(Mode.REPUTATION_AWARE, run_primary),
    "2sb-ra": MechanismSpec(Mode.REPUTATION_AWARE, run_2sb),
    "2sb-ru": MechanismSpec(Mode.REPUTATION_UNAWARE, run_2sb),
    "ptb-ra": MechanismSpec(Mode.REPUTATION_AWARE, run_ptb),
    "ptb-ru": MechanismSpec(Mode.REPUTATION_UNAWARE, run_ptb),
}


def run_mechanism(name: str, c: Campaign, ptb_admission: str = "budget"):
    try:
        spec = MECHANISMS[name]
    except KeyError:
        raise ValueError(f"unknown mechanism {name!r}; choose from {sorted(MECHANISMS)}") from None
    if c.mode is not spec.mode:
        c = c.with_mode(spec.mode)
    if spec.run is run_ptb:
        return run_ptb(c, admission=ptb_admission)
    return spec.run(c)


def parse_grid(text: str) -> tuple[int, ...]:
    """``"a:b:step"`` (inclusive) or a comma list, e.g. ``"100:600:100"``."""
    try:
        if ":" in text:
            a, b, step = (int(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            values = tuple(range(a, b + 1, step))
        else:
            values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"bad grid {text!r}; expected a:b:step or v1,v2,...") from None
    if not values or any(v <= 0 for v in values):
        raise ValueError(f"grid {text!r} must contain positive values")
    return values


@dataclass(frozen=True)
class Scenario:
    """One mechanism run over many auctions, optionally along a sweep axis.

    Without a sweep the scenario is a single grid point (axis ``"none"``,
    value 0) of ``n_auctions`` auctions. On the ``"auctions"`` axis each grid
    value is itself the number of auctions run at that point.
    """

    mechanism: str
    gen: GenConfig = field(default_factory=GenConfig)
    n_auctions: int = 100
    sweep: str | None = None
    grid: tuple[int, ...] = ()
    base_seed: int = 0
    ptb_admission: str = "budget"

    def __post_init__(self):
        if self.mechanism not in MECHANISMS:
            raise ValueError(f"unknown mechanism {self.mechanism!r}; choose from {sorted(MECHANISMS)}")
        if self.ptb_admission not in ("budget", "utility"):
            raise ValueError(f"unknown PTB admission rule {self.ptb_admission!r}")
        if self.n_auctions < 1:
            raise ValueError("n_auctions must be positive")
        object.__setattr__(self, "grid", tuple(int(g) for g in self.grid))
        if self.sweep is None:
            if self.grid:
                raise ValueError("a grid needs a sweep axis")
        else:
            if self.sweep not in AXES:
                raise ValueError(f"unknown sweep axis {self.sweep!r}; choose from {AXES}")
            if not self.grid or any(g <= 0 for g in self.grid):
                raise ValueError("sweep grid must be a nonempty list of positive integers")
        mode = MECHANISMS[self.mechanism].mode
        if self.gen.mode is not mode:
            object.__setattr__(self, "gen", replace(self.gen, mode=mode))

    @property
    def axis(self) -> str:
        return self.sweep or "none"

    def points(self) -> list[tuple[int, int]]:
        """``(grid_value, auctions_at_point)`` pairs in run order."""
        if self.sweep is None:
            return [(0, self.n_auctions)]
        if self.sweep == "auctions":
            return [(g, g) for g in self.grid]
        return [(g, self.n_auctions) for g in self.grid]

    def config_at(self, grid_value: int, seed: int) -> GenConfig:
        if self.sweep == "tasks":
            return replace(self.gen, n_tasks=grid_value, seed=seed)
        if self.sweep == "participants":
            return replace(self.gen, n_participants=grid_value, seed=seed)
        return replace(self.gen, seed=seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gen"]["mode"] = self.gen.mode.value
        d["gen"]["empty_interest"] = self.gen.empty_interest.value
        return d


def child_seed(base_seed: int, grid_value: int, auction: int) -> int:
    """64-bit campaign seed derived from (base seed, grid value, auction index)."""
    ss = np.random.SeedSequence([int(base_seed), int(grid_value), int(auction)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ResultRow:
    auction: int
    grid_axis: str
    grid_value: int
    seed: int
    cr: float
    avg_user_utility: float
    n_primary: int
    n_secondary: int
    total_payment: float
    wall_time: float = field(default=0.0, compare=False)


@dataclass
class ScenarioResult:
    scenario: Scenario
    rows: list[ResultRow]
    wall_time: float = 0.0

    def mean_cr(self) -> dict[int, float]:
        """Mean clearance rate per grid value."""
        out: dict[int, list[float]] = {}
        for r in self.rows:
            out.setdefault(r.grid_value, []).append(r.cr)
        return {g: float(np.mean(v)) for g, v in out.items()}

    def crs(self, grid_value: int | None = None) -> np.ndarray:
        return np.array([r.cr for r in self.rows if grid_value is None or r.grid_value == grid_value])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(
                [
                    r.auction,
                    r.grid_axis,
                    r.grid_value,
                    r.seed,
                    f"{r.cr:.6g}",
                    f"{r.avg_user_utility:.6g}",
                    r.n_primary,
                    r.n_secondary,
                    f"{r.total_payment:.6g}",
                ]
            )
        return buf.getvalue()

    def manifest(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "rows": len(self.rows),
            "csv_header": list(CSV_HEADER),
            "wall_time_s": round(self.wall_time, 3),
            "notes": (
                "scenario defaults are reconstructed values; "
                "no authoritative parameter table was available"
            ),
        }

    def write(self, path: str | Path) -> tuple[Path, Path]:
        """Write the CSV and a JSON manifest next to it."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv())
        side = path.with_name(path.name + ".manifest.json")
        side.write_text(json.dumps(self.manifest(), indent=2, sort_keys=True) + "\n")
        return path, side


def _run_one(job) -> ResultRow:
    scenario, grid_value, auction = job
    t0 = time.perf_counter()
    seed = child_seed(scenario.base_seed, grid_value, auction)
    c = generate_campaign(scenario.config_at(grid_value, seed))
    outcome = run_mechanism(scenario.mechanism, c, scenario.ptb_admission)
    m = evaluate(outcome, c)
    return ResultRow(
        auction=auction,
        grid_axis=scenario.axis,
        grid_value=grid_value,
        seed=seed,
        cr=m.clearance_rate,
        avg_user_utility=m.avg_user_utility,
        n_primary=m.n_primary,
        n_secondary=m.n_secondary,
        total_payment=m.total_payments,
        wall_time=time.perf_counter() - t0,
    )


def run_scenario(s: Scenario, workers: int = 1) -> ScenarioResult:
    """Run every auction of ``s``; rows come back ordered by (grid point, auction)."""
    jobs = [(s, g, k) for g, count in s.points() for k in range(count)]
    t0 = time.perf_counter()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_run_one(j) for j in jobs]
    elapsed = time.perf_counter() - t0
    log.info("%s: %d auctions in %.2fs", s.mechanism, len(rows), elapsed)
    return ScenarioResult(s, rows, elapsed)


def _check_comparable(s1: Scenario, s2: Scenario):
    g1 = replace(s1.gen, mode=Mode.REPUTATION_AWARE)
    g2 = replace(s2.gen, mode=Mode.REPUTATION_AWARE)
    if g1 != g2:
        raise ValueError("head-to-head scenarios must share the generation config")
    for attr in ("n_auctions", "sweep", "grid", "base_seed"):
        if getattr(s1, attr) != getattr(s2, attr):
            raise ValueError(f"head-to-head scenarios differ in {attr}")


def batch_frequencies(
    s1: Scenario, s2: Scenario, batches: int = 1, workers: int = 1
) -> list[float]:
    """Per batch, the fraction of auctions where ``s2``'s CR strictly beats ``s1``'s.

    Both mechanisms see the same campaigns. Batch ``b`` reseeds both
    scenarios with ``base_seed + b``.
    """
    _check_comparable(s1, s2)
    if batches < 1:
        raise ValueError("batches must be positive")
    freqs = []
    for b in range(batches):
        r1 = run_scenario(replace(s1, base_seed=s1.base_seed + b), workers)
        r2 = run_scenario(replace(s2, base_seed=s2.base_seed + b), workers)
        assert [r.seed for r in r1.rows] == [r.seed for r in r2.rows]
        wins = sum(b2.cr > b1.cr for b1, b2 in zip(r1.rows, r2.rows))
        freqs.append(wins / len(r1.rows))
    return freqs


def compare_head_to_head(s1: Scenario, s2: Scenario, batches: int = 1, workers: int = 1) -> float:
    """Mean over batches of the fraction of auctions mechanism 2 wins outright."""
    return float(np.mean(batch_frequencies(s1, s2, batches, workers)))

