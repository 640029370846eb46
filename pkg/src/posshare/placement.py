"""Share-to-server assignment under individual trust levels.

The optimization target is risk balancing: minimize the spread between the
largest and smallest risk-weighted precision load across the selected
servers, so no single server concentrates both risk and knowledge. A small
genetic search handles realistic sizes; an exhaustive oracle covers tiny
instances; the selection wrapper grows the server set one by one until the
user's probabilistic guarantees hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random
from typing import Optional, Sequence, Union

import numpy as np

from .metrics import AttackCurve, PrivacyRequirement, TrustRecord, attack_curve, satisfies

_GA_GENERATIONS = 200
_GA_POPULATION = 10
_GA_CHILDREN = 40
_EXHAUSTIVE_LIMIT = 10_000_000
_EXHAUSTIVE_CHUNK = 1 << 20


@dataclass(frozen=True)
class Placement:
    """assignment[j] is the index (into servers) holding share j."""

    assignment: tuple[int, ...]
    servers: tuple[TrustRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        object.__setattr__(self, "servers", tuple(self.servers))
        m = len(self.servers)
        if m < 1:
            raise ValueError("a placement needs at least one server")
        for j, idx in enumerate(self.assignment):
            if not (0 <= idx < m):
                raise ValueError(f"share {j} assigned to server index {idx}, but only {m} selected")

    def counts(self) -> list[int]:
        counts = [0] * len(self.servers)
        for idx in self.assignment:
            counts[idx] += 1
        return counts

    def risks(self) -> list[float]:
        return [s.risk for s in self.servers]


@dataclass(frozen=True)
class PlacementOutcome:
    placement: Placement
    servers_used: int
    objective: float
    satisfied: bool
    curve: AttackCurve


def _gains_vector(n: int, per_share_gain: Union[float, Sequence[float]]) -> list[float]:
    if isinstance(per_share_gain, (int, float)):
        return [float(per_share_gain)] * n
    gains = [float(g) for g in per_share_gain]
    if len(gains) != n:
        raise ValueError(f"need one precision gain per share: got {len(gains)} for n={n}")
    return gains


def _loads(assignment: Sequence[int], risks: Sequence[float], gains: Sequence[float]) -> list[float]:
    acc = [0.0] * len(risks)
    for share, server in enumerate(assignment):
        acc[server] += gains[share]
    return [risk * load for risk, load in zip(risks, acc)]


def objective(placement: Placement, per_share_gain: Union[float, Sequence[float]] = 1.0) -> float:
    """Risk-weighted load spread: max over servers of risk * held precision
    gain, minus the min over servers of the same. Zero-share servers count
    with load 0."""
    gains = _gains_vector(len(placement.assignment), per_share_gain)
    loads = _loads(placement.assignment, placement.risks(), gains)
    return max(loads) - min(loads)


def uniform_placement(n: int, servers: Sequence[TrustRecord]) -> Placement:
    """Round-robin spread; share counts differ by at most one."""
    if len(servers) < 1:
        raise ValueError("need at least one server")
    return Placement(tuple(j % len(servers) for j in range(n)), tuple(servers))


def _canonicalize(
    assignment: Sequence[int], servers: Sequence[TrustRecord], gains: Sequence[float]
) -> tuple[int, ...]:
    """Reassign share bundles so heavier precision loads sit on safer servers.

    Swapping two whole bundles between a safer and a riskier server moves
    both risk-weighted loads strictly inside their previous envelope, so
    this never worsens the load-spread objective while making share counts
    non-increasing in risk.
    """
    m = len(servers)
    bundles: list[list[int]] = [[] for _ in range(m)]
    for share, server in enumerate(assignment):
        bundles[server].append(share)
    gain_sums = [sum(gains[s] for s in bundle) for bundle in bundles]
    by_safety = sorted(range(m), key=lambda i: (servers[i].risk, i))
    by_load = sorted(range(m), key=lambda i: (-gain_sums[i], i))
    result = [0] * len(assignment)
    for safety_rank, bundle_idx in zip(by_safety, by_load):
        for share in bundles[bundle_idx]:
            result[share] = safety_rank
    return tuple(result)


def place_exhaustive(
    n: int, servers: Sequence[TrustRecord], per_share_gain: Union[float, Sequence[float]] = 1.0
) -> Placement:
    """Globally optimal placement by enumerating all m**n assignments.

    Ties break toward the lexicographically smallest assignment vector.
    Only feasible for m**n up to 1e7.
    """
    m = len(servers)
    if m < 1:
        raise ValueError("need at least one server")
    total = m**n
    if total > _EXHAUSTIVE_LIMIT:
        raise ValueError(f"{m}**{n} = {total} assignments exceed the exhaustive-search bound")
    gains = np.asarray(_gains_vector(n, per_share_gain))
    risks = np.asarray([s.risk for s in servers])
    place_values = m ** np.arange(n - 1, -1, -1, dtype=np.int64)

    best_obj = math.inf
    best_index = 0
    for start in range(0, total, _EXHAUSTIVE_CHUNK):
        stop = min(start + _EXHAUSTIVE_CHUNK, total)
        idx = np.arange(start, stop, dtype=np.int64)
        digits = (idx[:, None] // place_values[None, :]) % m
        loads = np.empty((stop - start, m))
        for server in range(m):
            loads[:, server] = ((digits == server) * gains[None, :]).sum(axis=1) * risks[server]
        objectives = loads.max(axis=1) - loads.min(axis=1)
        local = int(objectives.argmin())
        if objectives[local] < best_obj:
            best_obj = float(objectives[local])
            best_index = start + local
    digits = [(best_index // int(v)) % m for v in place_values]
    return Placement(tuple(digits), tuple(servers))


def place_optimized(
    n: int,
    servers: Sequence[TrustRecord],
    requirement: Optional[PrivacyRequirement] = None,
    share_radii: Optional[Sequence[float]] = None,
    rng: Optional[Random] = None,
    per_share_gain: Union[float, Sequence[float]] = 1.0,
    generations: int = _GA_GENERATIONS,
) -> Placement:
    """Genetic search for a balanced-risk placement.

    The population starts as the uniform placement plus nine random ones.
    Each generation breeds 40 children: two random parents, a 50% chance of
    per-gene uniform crossover (otherwise a clone of the first parent), then
    one randomly reassigned share. The 10 best children form the next
    generation; the best placement ever seen is returned, normalized so
    heavier bundles sit on safer servers. When a requirement and precision
    model are given, the loop stops early as soon as the best placement
    satisfies them.
    """
    m = len(servers)
    if m < 1:
        raise ValueError("need at least one server")
    if rng is None:
        rng = Random(0)
    risks = [s.risk for s in servers]
    gains = _gains_vector(n, per_share_gain)

    def key(assignment: tuple[int, ...]) -> tuple[float, float, tuple[int, ...]]:
        loads = _loads(assignment, risks, gains)
        return (max(loads) - min(loads), max(loads), assignment)

    population = [uniform_placement(n, servers).assignment]
    population += [tuple(rng.randrange(m) for _ in range(n)) for _ in range(_GA_POPULATION - 1)]
    best = min(population, key=key)

    for _ in range(generations):
        if requirement is not None and share_radii is not None:
            curve = attack_curve(Placement(best, tuple(servers)), share_radii, risks)
            if satisfies(curve, requirement):
                break
        children = []
        for _ in range(_GA_CHILDREN):
            a = population[rng.randrange(len(population))]
            b = population[rng.randrange(len(population))]
            if rng.random() < 0.5:
                child = [a[g] if rng.random() < 0.5 else b[g] for g in range(n)]
            else:
                child = list(a)
            child[rng.randrange(n)] = rng.randrange(m)
            children.append(tuple(child))
        children.sort(key=key)
        population = children[:_GA_POPULATION]
        if key(population[0]) < key(best):
            best = population[0]

    return Placement(_canonicalize(best, servers, gains), tuple(servers))


def select_and_place(
    requirement: PrivacyRequirement,
    n: int,
    candidates: Sequence[TrustRecord],
    m_min: int,
    share_radii: Sequence[float],
    rng: Random,
    per_share_gain: Union[float, Sequence[float]] = 1.0,
) -> PlacementOutcome:
    """Grow the server set from the m_min most trusted servers upward until a
    placement satisfies the requirement.

    At each size the uniform placement is tried first (it is free), then the
    genetic optimizer. The first satisfying placement wins; if even the full
    candidate set fails, the best-objective attempt is returned with
    satisfied=False so the caller can relax the thresholds and retry.
    """
    m0 = len(candidates)
    if not (1 <= m_min <= m0):
        raise ValueError(f"m_min must lie in [1, {m0}], got {m_min}")
    if n < m_min:
        raise ValueError(f"cannot hand every selected server a share: n={n} < m_min={m_min}")
    ranked = sorted(candidates, key=lambda rec: (rec.risk, rec.server_id))

    best: Optional[PlacementOutcome] = None
    for m in range(m_min, m0 + 1):
        chosen = tuple(ranked[:m])
        risks = [rec.risk for rec in chosen]
        for placement in (
            uniform_placement(n, chosen),
            place_optimized(n, chosen, requirement, share_radii, rng, per_share_gain),
        ):
            curve = attack_curve(placement, share_radii, risks)
            outcome = PlacementOutcome(
                placement=placement,
                servers_used=m,
                objective=objective(placement, per_share_gain),
                satisfied=satisfies(curve, requirement),
                curve=curve,
            )
            if outcome.satisfied:
                return outcome
            if best is None or outcome.objective < best.objective:
                best = outcome
    assert best is not None
    return best
