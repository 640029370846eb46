"""Exact attacker-success probabilities over server-compromise combinations.

Every subset of servers is enumerated (2**m for m servers, capped at 24);
the probability of a subset is the product of the risks of its members and
the complementary risks of everyone else. Grouping subsets by how many
refinement shares they surrender yields both the at-least-k probabilities
and the precision levels an attacker can reach.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np

if TYPE_CHECKING:
    from .placement import Placement

_MAX_ENUMERATED_SERVERS = 24


@dataclass(frozen=True)
class TrustRecord:
    """Per-server compromise probability from the trust database."""

    server_id: str
    risk: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.risk <= 1.0) or not math.isfinite(self.risk):
            raise ValueError(f"risk must lie in [0, 1], got {self.risk}")


@dataclass(frozen=True)
class PrivacyRequirement:
    """User thresholds: at precision phi_k the attack probability must stay
    strictly below p_k. A threshold of 1.0 leaves that level unconstrained."""

    levels: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple((float(phi), float(p)) for phi, p in self.levels))
        for phi, p in self.levels:
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"threshold probability must lie in [0, 1], got {p}")
            if phi < 0 or not math.isfinite(phi):
                raise ValueError(f"precision threshold must be a finite non-negative radius, got {phi}")
        ordered = sorted(self.levels)
        for (phi_a, p_a), (phi_b, p_b) in zip(ordered, ordered[1:]):
            if phi_a < phi_b and p_a < p_b:
                raise ValueError(
                    "coarser precision levels cannot carry larger probability "
                    f"thresholds: ({phi_a}, {p_a}) vs ({phi_b}, {p_b})"
                )


@dataclass(frozen=True)
class AttackCurve:
    """(phi, probability) pairs: probability of the attacker reaching a
    precision at least as fine as phi. Stored with phi descending."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple((float(phi), float(p)) for phi, p in self.points))
        for (phi_a, p_a), (phi_b, p_b) in zip(self.points, self.points[1:]):
            if phi_b > phi_a:
                raise ValueError("curve points must be ordered by descending precision radius")
            if p_b > p_a + 1e-12:
                raise ValueError("attack probability cannot grow as precision gets finer")


def _subset_distribution(
    risks: Sequence[float], weights: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Probability and total weight of every server subset, by bitmask doubling."""
    probs = np.ones(1)
    totals = np.zeros(1, dtype=np.int64)
    for risk, weight in zip(risks, weights):
        probs = np.concatenate([probs * (1.0 - risk), probs * risk])
        totals = np.concatenate([totals, totals + weight])
    return probs, totals


def _validate_risks(risks: Sequence[float]) -> list[float]:
    values = [float(r) for r in risks]
    if not values:
        raise ValueError("risk list must not be empty")
    if len(values) > _MAX_ENUMERATED_SERVERS:
        raise ValueError(f"subset enumeration is capped at {_MAX_ENUMERATED_SERVERS} servers")
    for r in values:
        if not (0.0 <= r <= 1.0):
            raise ValueError(f"risk must lie in [0, 1], got {r}")
    return values


def prob_at_least_k_compromised(risks: Sequence[float], k_attack: int) -> float:
    """Exact probability that at least k_attack of the servers are compromised."""
    values = _validate_risks(risks)
    if not (1 <= k_attack <= len(values)):
        raise ValueError(f"k_attack must lie in [1, {len(values)}], got {k_attack}")
    probs, totals = _subset_distribution(values, [1] * len(values))
    return float(probs[totals >= k_attack].sum())


def share_count_distribution(placement: "Placement", risks: Sequence[float]) -> dict[int, float]:
    """Probability of the attacker obtaining exactly k shares, per realizable k."""
    values = _validate_risks(risks)
    counts = placement.counts()
    if len(counts) != len(values):
        raise ValueError(f"{len(values)} risks given for {len(counts)} servers")
    probs, totals = _subset_distribution(values, counts)
    return {int(k): float(probs[totals == k].sum()) for k in np.unique(totals)}


def attack_curve(
    placement: "Placement", share_radii: Sequence[float], risks: Sequence[float]
) -> AttackCurve:
    """Attack curve of a placement: for every realizable share count k >= 1,
    the probability that compromised servers surrender at least k shares,
    paired with the precision radius k shares buy."""
    values = _validate_risks(risks)
    counts = placement.counts()
    if len(counts) != len(values):
        raise ValueError(f"{len(values)} risks given for {len(counts)} servers")
    n = len(placement.assignment)
    if len(share_radii) < n + 1:
        raise ValueError(f"need a precision radius for every share count 0..{n}")
    probs, totals = _subset_distribution(values, counts)
    points = []
    for k in sorted(int(v) for v in np.unique(totals)):
        if k < 1:
            continue
        tail = float(probs[totals >= k].sum())
        points.append((float(share_radii[k]), tail))
    return AttackCurve(points=tuple(points))


def attack_probability(curve: AttackCurve, phi: float) -> float:
    """Probability of the attacker reaching precision radius <= phi."""
    return max((p for point_phi, p in curve.points if point_phi <= phi), default=0.0)


def satisfies(curve: AttackCurve, requirement: PrivacyRequirement) -> bool:
    """True iff every requirement level keeps the attack probability strictly
    below its threshold (thresholds of 1.0 are vacuous)."""
    for phi, p_max in requirement.levels:
        if p_max >= 1.0:
            continue
        if not attack_probability(curve, phi) < p_max:
            return False
    return True


def load_trust_csv(path: Union[str, Path]) -> list[TrustRecord]:
    """Trust database file: CSV with header server_id,risk."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["server_id", "risk"]:
            raise ValueError(f"{path}: expected header 'server_id,risk', got {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            try:
                records.append(TrustRecord(row["server_id"].strip(), float(row["risk"])))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    if not records:
        raise ValueError(f"{path}: trust database is empty")
    return records


def requirement_from_json(text: str) -> PrivacyRequirement:
    doc = json.loads(text)
    try:
        levels = tuple((level["phi"], level["p"]) for level in doc["levels"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed requirement document: {exc}") from exc
    return PrivacyRequirement(levels=levels)


def requirement_to_json(requirement: PrivacyRequirement) -> str:
    return json.dumps({"levels": [{"phi": phi, "p": p} for phi, p in requirement.levels]})
