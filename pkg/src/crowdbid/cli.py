"""Command line entry point: ``crowdbid run | compare | oracle``."""

from __future__ import annotations

import argparse
import logging
import sys

from .domain import EmptyInterest, GenConfig
from .harness import AXES, MECHANISMS, Scenario, batch_frequencies, parse_grid, run_scenario
from .oracle import fuzz


def _gen_args(p: argparse.ArgumentParser):
    p.add_argument("--tasks", type=int, default=100, help="number of tasks M")
    p.add_argument("--participants", type=int, default=100, help="number of phones N")
    p.add_argument("--auctions", type=int, default=100, help="auctions per grid point")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--alpha", type=float, default=2.0, help="per-task bid spread around the task value")
    p.add_argument("--radius", type=float, default=30.0, help="interest radius in meters")
    p.add_argument("--area", type=float, default=1000.0, help="side of the square area in meters")
    p.add_argument(
        "--empty-interest",
        choices=[e.value for e in EmptyInterest],
        default=EmptyInterest.DROP.value,
        help="phones with no task in range: drop them or relocate them",
    )
    p.add_argument(
        "--ptb-admission", choices=["budget", "utility"], default="budget",
        help="PTB admission rule",
    )
    p.add_argument("--workers", type=int, default=1, help="worker processes")


def _gen(args) -> GenConfig:
    return GenConfig(
        n_tasks=args.tasks,
        n_participants=args.participants,
        area_side=args.area,
        interest_radius=args.radius,
        alpha=args.alpha,
        empty_interest=args.empty_interest,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crowdbid", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one mechanism over many auctions and write CSV rows")
    run.add_argument("--mechanism", required=True, choices=sorted(MECHANISMS))
    _gen_args(run)
    run.add_argument("--sweep", choices=AXES)
    run.add_argument("--grid", help="sweep values as a:b:step or v1,v2,...")
    run.add_argument("--out", help="CSV path (a .manifest.json is written next to it); stdout if omitted")

    cmp_ = sub.add_parser("compare", help="how often mechanism B strictly beats A on shared campaigns")
    cmp_.add_argument("--a", required=True, choices=sorted(MECHANISMS))
    cmp_.add_argument("--b", required=True, choices=sorted(MECHANISMS))
    _gen_args(cmp_)
    cmp_.add_argument("--batches", type=int, default=1, help="independent batches to average over")

    orc = sub.add_parser("oracle", help="brute-force checks on fuzzed toy campaigns")
    orc.add_argument("--fuzz", type=int, default=1000, help="number of random instances")
    orc.add_argument("--max-n", type=int, default=8)
    orc.add_argument("--max-m", type=int, default=8)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--all", action="store_true", help="print every report, not only failures")
    return parser


def _cmd_run(args) -> int:
    if (args.sweep is None) != (args.grid is None):
        raise ValueError("--sweep and --grid go together")
    grid = parse_grid(args.grid) if args.grid else ()
    s = Scenario(
        mechanism=args.mechanism,
        gen=_gen(args),
        n_auctions=args.auctions,
        sweep=args.sweep,
        grid=grid,
        base_seed=args.seed,
        ptb_admission=args.ptb_admission,
    )
    result = run_scenario(s, workers=args.workers)
    if args.out:
        csv_path, manifest = result.write(args.out)
        print(f"wrote {len(result.rows)} rows to {csv_path} ({manifest.name})", file=sys.stderr)
    else:
        sys.stdout.write(result.to_csv())
    for g, cr in result.mean_cr().items():
        print(f"{s.mechanism} {s.axis}={g}: mean CR {100 * cr:.2f}%", file=sys.stderr)
    return 0


def _cmd_compare(args) -> int:
    common = dict(gen=_gen(args), n_auctions=args.auctions, base_seed=args.seed,
                  ptb_admission=args.ptb_admission)
    freqs = batch_frequencies(
        Scenario(mechanism=args.a, **common), Scenario(mechanism=args.b, **common),
        batches=args.batches, workers=args.workers,
    )
    for k, f in enumerate(freqs):
        print(f"batch {k}: {args.b} > {args.a} in {100 * f:.1f}% of auctions")
    print(f"mean: {100 * sum(freqs) / len(freqs):.2f}%")
    return 0


def _cmd_oracle(args) -> int:
    if args.max_n > 12:
        raise ValueError("--max-n is limited to 12")
    reports = fuzz(args.fuzz, max_n=args.max_n, max_m=args.max_m, seed=args.seed)
    failed = [r for r in reports if not r.passed]
    for r in reports if args.all else failed:
        print(r.to_text())
    edge = sum(len(r.info.get("competitor_free", ())) for r in reports)
    print(
        f"oracle: {len(reports) - len(failed)}/{len(reports)} instances passed; "
        f"{edge} competitor-free winners reported, not asserted"
    )
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handler = {"run": _cmd_run, "compare": _cmd_compare, "oracle": _cmd_oracle}[args.command]
    try:
        return handler(args)
    except ValueError as e:
        print(f"crowdbid: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
