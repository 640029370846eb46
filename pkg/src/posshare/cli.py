"""Command-line entry point.

Subcommands: generate, fuse, place, simulate, report. Every result file
echoes the seed in its header; identical seeds and inputs produce byte
identical outputs. Exit codes: 0 success, 1 usage error, 2 infeasible input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from random import Random
from typing import Optional, Sequence

from .csps import InfeasibleMapError, fuse_csps, generate_csps
from .geometry import Point
from .mapgrid import load_grid
from .metrics import load_trust_csv, requirement_from_json
from .osps import fuse_osps, generate_osps
from .placement import select_and_place
from .shares import CSPS, OSPS, osps_share_radii, share_set_from_json
from .sim import load_trajectory, run_update_experiment
from .update import read_ledger_csv, write_ledger_csv

DEFAULT_SEED = 1729

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; this tool reserves 2 for
    # infeasible inputs, so usage problems exit 1 instead.
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write_json(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _cmd_generate(args: argparse.Namespace) -> int:
    rng = Random(args.seed)
    pi = Point(args.x, args.y)
    if args.map is not None:
        grid = load_grid(args.map)
        share_set = generate_csps(args.n, grid, args.r0, pi, rng)
    else:
        share_set = generate_osps(pi, args.n, args.r0, rng)
    _write_json(args.out, {"seed": args.seed, **share_set.to_dict()})
    return EXIT_OK


def _cmd_fuse(args: argparse.Namespace) -> int:
    share_set = share_set_from_json(Path(args.shares).read_text())
    if args.k is None:
        args.k = share_set.n
    if not (0 <= args.k <= share_set.n):
        raise ValueError(f"k must lie in [0, {share_set.n}], got {args.k}")
    chosen = share_set.refinements[: args.k]
    if share_set.mode == OSPS:
        circle = fuse_osps(share_set.n, share_set.master, chosen)
        payload = {
            "seed": args.seed,
            "x": circle.center.x,
            "y": circle.center.y,
            "r": circle.radius,
        }
    else:
        if args.map is None:
            raise ValueError("fusing a map-aware share set requires --map")
        grid = load_grid(args.map)
        area = fuse_csps(grid, share_set.n, share_set.master.circle, chosen)
        payload = {
            "seed": args.seed,
            "area": area.area,
            "circles": [{"x": c.center.x, "y": c.center.y, "r": c.radius} for c in area.circles],
        }
    _write_json(args.out, payload)
    return EXIT_OK


def _cmd_place(args: argparse.Namespace) -> int:
    records = load_trust_csv(args.trust)
    requirement = requirement_from_json(Path(args.requirement).read_text())
    share_radii = osps_share_radii(args.r0, args.n)
    outcome = select_and_place(
        requirement, args.n, records, args.m_min, share_radii, Random(args.seed)
    )
    payload = {
        "seed": args.seed,
        "servers": [rec.server_id for rec in outcome.placement.servers],
        "assignment": list(outcome.placement.assignment),
        "objective": outcome.objective,
        "satisfied": outcome.satisfied,
        "curve": [{"phi": phi, "p": p} for phi, p in outcome.curve.points],
    }
    _write_json(args.out, payload)
    if not outcome.satisfied:
        print(
            "error: requirement unsatisfiable with the given servers; relax the thresholds",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    traj = load_trajectory(args.trajectory, args.format)
    ledger = run_update_experiment(
        traj,
        args.n,
        args.r0,
        (args.basic_cost, args.optimized_cost),
        Random(args.seed),
        max_speed=args.max_speed,
    )
    write_ledger_csv(ledger, args.out, seed=args.seed)
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    if args.ledger is None:
        raise ValueError("report needs --ledger")
    ledger = read_ledger_csv(args.ledger)
    rows = [
        ("updates", len(ledger.entries)),
        ("basic_updates", ledger.count("basic")),
        ("optimized_updates", ledger.count("optimized")),
        ("suppressed_updates", ledger.count("suppressed")),
        ("mo_ls_total", ledger.mo_ls_total),
        ("total_messages", ledger.total_messages),
        ("baseline_messages", ledger.baseline_messages),
        ("reduction", repr(ledger.reduction)),
    ]
    lines = [f"# seed={args.seed}", "metric,value"]
    lines += [f"{name},{value}" for name, value in rows]
    Path(args.out).write_text("\n".join(lines) + "\n")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="posshare", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate a share set for a precise position")
    p_gen.add_argument("--x", type=float, required=True, help="precise position x, meters")
    p_gen.add_argument("--y", type=float, required=True, help="precise position y, meters")
    p_gen.add_argument("-n", type=int, required=True, help="number of refinement shares")
    p_gen.add_argument("--r0", type=float, required=True, help="master circle radius, meters")
    p_gen.add_argument("--map", help="feasibility grid file (switches to map-aware generation)")
    p_gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_gen.add_argument("--out", required=True, help="output share-set JSON")
    p_gen.set_defaults(func=_cmd_generate)

    p_fuse = sub.add_parser("fuse", help="fuse the first k shares of a share set")
    p_fuse.add_argument("--shares", required=True, help="share-set JSON from generate")
    p_fuse.add_argument("-k", type=int, default=None, help="how many shares to fuse (default all)")
    p_fuse.add_argument("--map", help="feasibility grid file (required for map-aware sets)")
    p_fuse.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_fuse.add_argument("--out", required=True, help="output circle/area JSON")
    p_fuse.set_defaults(func=_cmd_fuse)

    p_place = sub.add_parser("place", help="select servers and optimize share placement")
    p_place.add_argument("--trust", required=True, help="trust database CSV (server_id,risk)")
    p_place.add_argument("--requirement", required=True, help="requirement JSON ({levels:[{phi,p}]})")
    p_place.add_argument("-n", type=int, required=True, help="number of refinement shares")
    p_place.add_argument("--r0", type=float, required=True, help="master radius defining the precision scale")
    p_place.add_argument("--m-min", type=int, default=1, dest="m_min", help="smallest server count to try")
    p_place.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_place.add_argument("--out", required=True, help="output placement JSON")
    p_place.set_defaults(func=_cmd_place)

    p_sim = sub.add_parser("simulate", help="replay a trajectory through the update protocol")
    p_sim.add_argument("--trajectory", required=True, help="trajectory file")
    p_sim.add_argument("--format", choices=["simple-csv", "geolife-plt"], default="simple-csv")
    p_sim.add_argument("-n", type=int, required=True, help="number of refinement shares")
    p_sim.add_argument("--r0", type=float, required=True, help="master circle radius, meters")
    p_sim.add_argument("--basic-cost", type=int, default=20, dest="basic_cost")
    p_sim.add_argument("--optimized-cost", type=int, default=6, dest="optimized_cost")
    p_sim.add_argument("--max-speed", type=float, default=None, dest="max_speed",
                       help="enable update suppression below twice the travel time at this speed (m/s)")
    p_sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sim.add_argument("--out", required=True, help="output ledger CSV")
    p_sim.set_defaults(func=_cmd_simulate)

    p_rep = sub.add_parser("report", help="summarize a ledger CSV")
    p_rep.add_argument("--ledger", required=True, help="ledger CSV from simulate")
    p_rep.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_rep.add_argument("--out", required=True, help="output summary CSV")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleMapError, ValueError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
