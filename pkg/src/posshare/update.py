"""Position updates that send one message instead of n whenever possible.

When the mobile object moves far enough that consecutive master circles
cannot intersect, only a fresh master share is published: the refinement
shares are relative shift vectors, so anchoring the same chain at the
chain-closing point under the new position keeps every fusion radius
identical while full fusion lands on the new position.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from random import Random
from typing import Optional, Union

from .geometry import Circle, Point, distance
from .osps import generate_osps
from .shares import OSPS, MasterShare, RefinementShare, ShareSet

OPTIMIZED = "optimized"
BASIC = "basic"
SUPPRESSED = "suppressed"


@dataclass(frozen=True)
class UpdateDecision:
    kind: str
    messages_mo_ls: int
    new_master: MasterShare
    new_refinements: Optional[tuple[RefinementShare, ...]] = None

    def __post_init__(self) -> None:
        if self.kind == OPTIMIZED and self.messages_mo_ls != 1:
            raise ValueError("an optimized update sends exactly one MO->LS message")
        if self.kind == BASIC and self.new_refinements is None:
            raise ValueError("a basic update must carry the regenerated refinement shares")


@dataclass(frozen=True)
class LedgerEntry:
    index: int
    kind: str
    mo_ls: int
    ls_lba: int


@dataclass
class MessageLedger:
    """Per-update message accounting against an all-basic baseline.

    Per-update totals (basic_cost, optimized_cost) cover both the MO->LS
    messages and the LS->LBA fan-out; the fan-out share of each entry is the
    per-update total minus the MO->LS count. Suppressed updates cost nothing
    under either protocol.
    """

    n: int
    basic_cost: int
    optimized_cost: int
    entries: list[LedgerEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.basic_cost < self.n:
            raise ValueError(f"basic per-update cost {self.basic_cost} cannot be below n={self.n}")
        if self.optimized_cost < 1:
            raise ValueError("optimized per-update cost must cover the single MO->LS message")

    def record(self, index: int, kind: str) -> None:
        if kind == BASIC:
            self.entries.append(LedgerEntry(index, BASIC, self.n, self.basic_cost - self.n))
        elif kind == OPTIMIZED:
            self.entries.append(LedgerEntry(index, OPTIMIZED, 1, self.optimized_cost - 1))
        elif kind == SUPPRESSED:
            self.entries.append(LedgerEntry(index, SUPPRESSED, 0, 0))
        else:
            raise ValueError(f"unknown update kind {kind!r}")

    def count(self, kind: str) -> int:
        return sum(1 for e in self.entries if e.kind == kind)

    @property
    def mo_ls_total(self) -> int:
        return sum(e.mo_ls for e in self.entries)

    @property
    def total_messages(self) -> int:
        return sum(e.mo_ls + e.ls_lba for e in self.entries)

    @property
    def baseline_messages(self) -> int:
        return sum(self.basic_cost for e in self.entries if e.kind != SUPPRESSED)

    @property
    def reduction(self) -> float:
        baseline = self.baseline_messages
        if baseline == 0:
            return 0.0
        return 1.0 - self.total_messages / baseline


def reduction_rate(n: int) -> float:
    """MO->LS message saving of one optimized update: (n - 1) / n."""
    if n < 1:
        raise ValueError(f"share count n must be >= 1, got {n}")
    return (n - 1) / n


def decide_update(prev_master: MasterShare, new_master_center: Point, r0: float) -> bool:
    """True iff consecutive master circles of radius r0 cannot intersect,
    i.e. their centers are strictly more than 2 * r0 apart."""
    return distance(prev_master.circle.center, new_master_center) > 2.0 * r0


def update_shares(
    pi_prev: Point, pi_next: Point, set_prev: ShareSet, rng: Random
) -> UpdateDecision:
    """Decide between a master-only update and full regeneration.

    The candidate master center is the chain-closing point pi_next minus the
    sum of all refinement shifts: the only placement that keeps the existing
    shares valid. If the candidate circle is disjoint from the previous
    master circle (and still covers pi_next), the refinements are reused and
    one message suffices; otherwise the whole set is regenerated for pi_next.
    """
    if set_prev.mode != OSPS:
        raise ValueError("the update protocol reuses shift chains of open-space sets only")
    r0 = set_prev.master.circle.radius
    sum_dx = math.fsum(s.shift.dx for s in set_prev.refinements)
    sum_dy = math.fsum(s.shift.dy for s in set_prev.refinements)
    closure = Point(set_prev.master.circle.center.x + sum_dx, set_prev.master.circle.center.y + sum_dy)
    if distance(closure, pi_prev) > 1e-6 * max(1.0, r0):
        raise ValueError("set_prev does not close on pi_prev; was it generated for another position?")

    candidate = Point(pi_next.x - sum_dx, pi_next.y - sum_dy)
    if decide_update(set_prev.master, candidate, r0) and distance(candidate, pi_next) <= r0:
        return UpdateDecision(OPTIMIZED, 1, MasterShare(Circle(candidate, r0)))
    regenerated = generate_osps(pi_next, set_prev.n, r0, rng)
    return UpdateDecision(BASIC, set_prev.n, regenerated.master, regenerated.refinements)


def apply_decision(set_prev: ShareSet, decision: UpdateDecision) -> ShareSet:
    """Fold an update decision into the current share set."""
    if decision.kind == OPTIMIZED:
        return set_prev.with_master(decision.new_master)
    assert decision.new_refinements is not None
    return ShareSet(
        master=decision.new_master,
        refinements=decision.new_refinements,
        delta_r=decision.new_master.circle.radius / len(decision.new_refinements),
        mode=set_prev.mode,
    )


def min_interval_for_speed(dist: float, max_speed: float) -> float:
    """Smallest update interval that defeats a maximum-velocity bound: the
    user must have been able to travel the distance at least twice over."""
    if max_speed <= 0:
        raise ValueError("max speed must be positive")
    return 2.0 * dist / max_speed


def write_ledger_csv(
    ledger: MessageLedger, path: Union[str, Path], seed: Optional[int] = None
) -> None:
    with open(path, "w", newline="") as fh:
        header = f"# n={ledger.n} basic_cost={ledger.basic_cost} optimized_cost={ledger.optimized_cost}"
        if seed is not None:
            header = f"# seed={seed} " + header[2:]
        fh.write(header + "\n")
        writer = csv.writer(fh)
        writer.writerow(["update_index", "kind", "mo_ls", "ls_lba"])
        for e in ledger.entries:
            writer.writerow([e.index, e.kind, e.mo_ls, e.ls_lba])


def read_ledger_csv(path: Union[str, Path]) -> MessageLedger:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing ledger header comment")
    meta = dict(token.split("=", 1) for token in lines[0][1:].split() if "=" in token)
    try:
        ledger = MessageLedger(
            n=int(meta["n"]), basic_cost=int(meta["basic_cost"]), optimized_cost=int(meta["optimized_cost"])
        )
    except KeyError as exc:
        raise ValueError(f"{path}: ledger header lacks {exc}") from exc
    reader = csv.DictReader(lines[1:])
    for row in reader:
        ledger.entries.append(
            LedgerEntry(int(row["update_index"]), row["kind"], int(row["mo_ls"]), int(row["ls_lba"]))
        )
    return ledger
