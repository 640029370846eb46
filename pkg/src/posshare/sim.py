"""Deterministic trajectory replay through in-memory location servers.

The "network" is a synchronous function call with a message ledger attached;
what the experiments measure is message counts, not latency. All randomness
flows through one injected generator so identical seeds reproduce ledgers
and result tables byte for byte.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from random import Random
from typing import Optional, Sequence, Union

from .csps import ObfuscationArea, fuse_csps
from .geometry import Circle, Point, distance, project_to_plane
from .mapgrid import MapGrid
from .metrics import (
    PrivacyRequirement,
    TrustRecord,
    attack_curve,
    attack_probability,
    share_count_distribution,
)
from .osps import fuse_osps, generate_osps
from .placement import Placement, objective, place_optimized, uniform_placement
from .shares import CSPS, OSPS, MasterShare, RefinementShare, ShareSet
from .update import (
    BASIC,
    MessageLedger,
    SUPPRESSED,
    apply_decision,
    min_interval_for_speed,
    update_shares,
)


@dataclass(frozen=True)
class Trajectory:
    """Ordered position fixes: (timestamp seconds, planar point)."""

    fixes: tuple[tuple[float, Point], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "fixes", tuple(self.fixes))
        if not self.fixes:
            raise ValueError("a trajectory needs at least one fix")
        for (t_a, _), (t_b, _) in zip(self.fixes, self.fixes[1:]):
            if t_b <= t_a:
                raise ValueError(f"timestamps must strictly increase ({t_a} -> {t_b})")

    def __len__(self) -> int:
        return len(self.fixes)


def _project_rows(rows: Sequence[tuple[float, float, float]]) -> Trajectory:
    _, lat0, lon0 = rows[0]
    fixes = tuple((t, project_to_plane(lat, lon, lat0, lon0)) for t, lat, lon in rows)
    return Trajectory(fixes)


def _load_simple_csv(path: Union[str, Path]) -> Trajectory:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty trajectory file")
        if [h.strip() for h in header] != ["t", "lat", "lon"]:
            raise ValueError(f"{path}: expected header 't,lat,lon', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t, lat, lon = (float(v) for v in row[:3])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
            rows.append((t, lat, lon))
    if not rows:
        raise ValueError(f"{path}: trajectory has no fixes")
    return _project_rows(rows)


#: PLT files start with this many non-data lines
_PLT_HEADER_LINES = 6
#: the day-count field counts days since 1899-12-30
_SECONDS_PER_DAY = 86_400.0


def _load_geolife_plt(path: Union[str, Path]) -> Trajectory:
    lines = Path(path).read_text().splitlines()
    if len(lines) <= _PLT_HEADER_LINES:
        raise ValueError(f"{path}: no data lines after the {_PLT_HEADER_LINES}-line header")
    rows = []
    for lineno, line in enumerate(lines[_PLT_HEADER_LINES:], start=_PLT_HEADER_LINES + 1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) < 7:
            raise ValueError(f"{path}: line {lineno}: expected 7 fields, got {len(parts)}")
        try:
            lat, lon = float(parts[0]), float(parts[1])
            days = float(parts[4])
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from exc
        rows.append((days * _SECONDS_PER_DAY, lat, lon))
    if not rows:
        raise ValueError(f"{path}: trajectory has no fixes")
    return _project_rows(rows)


def load_trajectory(path: Union[str, Path], fmt: str = "simple-csv") -> Trajectory:
    """Load a trajectory file and project it to planar meters around its
    first fix. Formats: 'simple-csv' (header t,lat,lon) or 'geolife-plt'."""
    if fmt == "simple-csv":
        return _load_simple_csv(path)
    if fmt == "geolife-plt":
        return _load_geolife_plt(path)
    raise ValueError(f"unknown trajectory format {fmt!r}")


def engineered_trajectory(
    total_fixes: int, eligible_moves: int, r0: float, interval_s: float = 15.0
) -> Trajectory:
    """Synthetic straight-line trajectory with a chosen number of moves long
    enough for a master-only update.

    A move farther than 2 * r0 makes the chain-closing master candidate
    disjoint from the previous master with certainty, and a shorter move
    never does, so eligible_moves of length 2.5 * r0 (interleaved evenly
    with short 0.5 * r0 moves) pin the optimized/basic split exactly; the
    first fix is always a full generation.
    """
    moves = total_fixes - 1
    if not (0 <= eligible_moves <= moves):
        raise ValueError(f"eligible_moves must lie in [0, {moves}]")
    fixes = [(0.0, Point(0.0, 0.0))]
    x = 0.0
    error = 0
    placed = 0
    for i in range(moves):
        error += eligible_moves
        if error >= moves and placed < eligible_moves:
            error -= moves
            placed += 1
            x += 2.5 * r0
        else:
            x += 0.5 * r0
        fixes.append(((i + 1) * interval_s, Point(x, 0.0)))
    return Trajectory(tuple(fixes))


def run_update_experiment(
    traj: Trajectory,
    n: int,
    r0: float,
    costs: tuple[int, int] = (20, 6),
    rng: Optional[Random] = None,
    max_speed: Optional[float] = None,
) -> MessageLedger:
    """Replay a trajectory through the update protocol and account messages.

    The first fix always generates and sends a full share set. Setting
    max_speed enables the update-suppression countermeasure: an update is
    dropped (costing nothing under either protocol) when it arrives sooner
    than twice the straight-line travel time from the last sent position.
    """
    if rng is None:
        rng = Random(0)
    basic_cost, optimized_cost = costs
    ledger = MessageLedger(n=n, basic_cost=basic_cost, optimized_cost=optimized_cost)

    t_sent, pos_sent = traj.fixes[0]
    current = generate_osps(pos_sent, n, r0, rng)
    ledger.record(0, BASIC)
    for index, (t, pos) in enumerate(traj.fixes[1:], start=1):
        if max_speed is not None:
            if (t - t_sent) < min_interval_for_speed(distance(pos_sent, pos), max_speed):
                ledger.record(index, SUPPRESSED)
                continue
        decision = update_shares(pos_sent, pos, current, rng)
        current = apply_decision(current, decision)
        ledger.record(index, decision.kind)
        t_sent, pos_sent = t, pos
    return ledger


@dataclass
class LocationServer:
    """One non-trusted store: the public master plus its refinement shares."""

    server_id: str
    risk: float
    n_total: int = 0
    master: Optional[MasterShare] = None
    refinements: dict[int, RefinementShare] = field(default_factory=dict)


def distribute_shares(
    share_set: ShareSet, servers: Sequence[LocationServer], assignment: Optional[Sequence[int]] = None
) -> None:
    """Store the master on every server and the refinement shares per the
    assignment (round-robin when none is given, matching uniform placement)."""
    m = len(servers)
    if m < 1:
        raise ValueError("need at least one server")
    if assignment is None:
        assignment = [j % m for j in range(share_set.n)]
    if len(assignment) != share_set.n:
        raise ValueError(f"assignment covers {len(assignment)} shares, set has {share_set.n}")
    for server in servers:
        server.master = share_set.master
        server.n_total = share_set.n
        server.refinements.clear()
    for share_index, server_index in enumerate(assignment):
        servers[server_index].refinements[share_index] = share_set.refinements[share_index]


def lba_query(
    servers: Sequence[LocationServer],
    accessible_ids: Sequence[str],
    mode: str = OSPS,
    grid: Optional[MapGrid] = None,
) -> Union[Circle, ObfuscationArea]:
    """Fuse whatever the accessible servers hold.

    Raises LookupError when no accessible server (and hence no master share)
    is reachable. Shares are fused in share-index order.
    """
    allowed = set(accessible_ids)
    reachable = [s for s in servers if s.server_id in allowed]
    if not reachable:
        raise LookupError("no accessible location server: master share unavailable")
    master = next((s.master for s in reachable if s.master is not None), None)
    if master is None:
        raise LookupError("no accessible location server holds the master share")
    collected: dict[int, RefinementShare] = {}
    for server in reachable:
        collected.update(server.refinements)
    shares = [collected[i] for i in sorted(collected)]
    n_total = max(s.n_total for s in reachable)
    if mode == OSPS:
        return fuse_osps(n_total, master, shares)
    if mode == CSPS:
        if grid is None:
            raise ValueError("map-aware fusion needs the feasibility grid")
        return fuse_csps(grid, n_total, master.circle, shares)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class PlacementComparison:
    """Uniform vs optimized attack curves on a common precision axis."""

    rows: tuple[tuple[int, float, float, float, float], ...]  # k, phi, p_uniform, p_optimized, delta
    uniform: Placement
    optimized: Placement
    uniform_objective: float
    optimized_objective: float
    peak_share_count: int
    peak_phi: float
    peak_gap: float


def run_placement_experiment(
    risks: Sequence[float],
    n: int,
    requirement: Optional[PrivacyRequirement],
    share_radii: Sequence[float],
    rng: Random,
) -> PlacementComparison:
    """Compare uniform and optimized placements of n shares on the given
    servers, on the shared precision axis share_radii.

    The dominant probability peak is the share count carrying the largest
    exactly-k probability mass under the uniform placement; the reported gap
    is the drop in attack probability the optimizer achieves there.
    """
    records = tuple(
        TrustRecord(f"ls{i + 1}", risk)
        for i, risk in enumerate(sorted(risks))
    )
    risk_values = [rec.risk for rec in records]
    uniform = uniform_placement(n, records)
    optimized = place_optimized(n, records, requirement, share_radii, rng)
    curve_u = attack_curve(uniform, share_radii, risk_values)
    curve_o = attack_curve(optimized, share_radii, risk_values)

    exactly = share_count_distribution(uniform, risk_values)
    peak_k = max((k for k in exactly if k >= 1), key=lambda k: (exactly[k], -k))
    peak_phi = float(share_radii[peak_k])
    peak_gap = attack_probability(curve_u, peak_phi) - attack_probability(curve_o, peak_phi)

    rows = []
    for k in range(1, n + 1):
        phi = float(share_radii[k])
        p_u = attack_probability(curve_u, phi)
        p_o = attack_probability(curve_o, phi)
        rows.append((k, phi, p_u, p_o, p_u - p_o))
    return PlacementComparison(
        rows=tuple(rows),
        uniform=uniform,
        optimized=optimized,
        uniform_objective=objective(uniform),
        optimized_objective=objective(optimized),
        peak_share_count=peak_k,
        peak_phi=peak_phi,
        peak_gap=peak_gap,
    )


def write_placement_comparison_csv(
    comparison: PlacementComparison, path: Union[str, Path], seed: Optional[int] = None
) -> None:
    with open(path, "w", newline="") as fh:
        if seed is not None:
            fh.write(f"# seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(["k", "phi", "p_uniform", "p_optimized", "delta"])
        for k, phi, p_u, p_o, delta in comparison.rows:
            writer.writerow([k, repr(phi), repr(p_u), repr(p_o), repr(delta)])


def sweep_r0(
    traj: Trajectory,
    n: int,
    r0_values: Sequence[float],
    costs: tuple[int, int] = (20, 6),
    seed: int = 0,
) -> list[tuple[float, int, int, float]]:
    """Reduction ratio of the optimized protocol for a range of master radii.

    Each radius gets a fresh generator derived from the same seed so rows
    are independent of sweep order.
    """
    rows = []
    for r0 in r0_values:
        ledger = run_update_experiment(traj, n, r0, costs, Random(seed))
        rows.append((r0, ledger.total_messages, ledger.baseline_messages, ledger.reduction))
    return rows


def write_r0_sweep_csv(
    rows: Sequence[tuple[float, int, int, float]], path: Union[str, Path], seed: Optional[int] = None
) -> None:
    with open(path, "w", newline="") as fh:
        if seed is not None:
            fh.write(f"# seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(["r0", "total_messages", "baseline_messages", "reduction"])
        for r0, total, baseline, reduction in rows:
            writer.writerow([repr(float(r0)), total, baseline, repr(reduction)])
