"""Constrained-space position sharing: map-aware generation and fusion.

An attacker who knows a feasibility raster can shrink any obfuscation circle
to its feasible part, so generation grows each circle until the feasible
intersection offers at least the area an unconstrained circle of the nominal
radius would. Every growth also shifts the circle center by a random amount
bounded by the growth, so the pre-growth geometry cannot be reconstructed
from the published radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random
from typing import Optional, Sequence

import numpy as np

from .geometry import Circle, Point, distance, intersection_area, lattice_circle_area
from .mapgrid import MapGrid
from .osps import random_point_in_disk
from .shares import CSPS, MasterShare, RefinementShare, ShareSet

#: rejection draws for the randomized center shift before falling back to no shift
_MAX_SHIFT_DRAWS = 1_000
#: recursion depth of the grow-shift-recheck cycle before declaring the map infeasible
_MAX_GROW_DEPTH = 64
#: rejection draws per refinement shift before aiming straight at the target position
_MAX_VECTOR_DRAWS = 10_000


class InfeasibleMapError(RuntimeError):
    """The feasible cells of the map cannot supply the requested obfuscation area."""


@dataclass(frozen=True)
class ObfuscationArea:
    """Result of a map-aware fusion: the circle chain and its feasible area."""

    circles: tuple[Circle, ...]
    grid: MapGrid
    area: float


class _AreaProbe:
    """Feasible-intersection areas against a fixed grid and fixed prior circles.

    The grid truth values and the prior-circle masks never change while one
    circle is being grown, so they are rasterized once; each probe then only
    masks the varying circle. Counts match geometry.intersection_area cell
    for cell because both test the same cell centers with the same inclusive
    inequality.
    """

    def __init__(self, grid: MapGrid, priors: Sequence[Circle]):
        self._grid = grid
        cs = grid.cell_size
        self._xs = grid.origin.x + (np.arange(grid.width) + 0.5) * cs
        self._ys = grid.origin.y + (np.arange(grid.height) + 0.5) * cs
        base = grid.cells.copy()
        for c in priors:
            dx = self._xs[None, :] - c.center.x
            dy = self._ys[:, None] - c.center.y
            base &= dx * dx + dy * dy <= c.radius * c.radius
        self._base = base
        self._cell_area = cs * cs

    def area(self, c: Circle) -> float:
        dx = self._xs[None, :] - c.center.x
        dy = self._ys[:, None] - c.center.y
        inside = dx * dx + dy * dy <= c.radius * c.radius
        return float((self._base & inside).sum()) * self._cell_area


def fuse_csps(
    grid: MapGrid, n: int, c0: Circle, shares: Sequence[RefinementShare]
) -> ObfuscationArea:
    """Fuse k <= n map-aware shares: walk the shift chain and intersect the
    feasibility raster with every circle along it."""
    if n < 1:
        raise ValueError(f"share count n must be >= 1, got {n}")
    if len(shares) > n:
        raise ValueError(f"cannot fuse {len(shares)} shares from a set of {n}")
    circles = [c0]
    p = c0.center
    for i, share in enumerate(shares):
        if share.radius is None:
            raise ValueError(f"share {i} carries no radius; map-aware fusion needs one per share")
        p = p + share.shift
        circles.append(Circle(p, share.radius))
    area = intersection_area(circles, grid)
    return ObfuscationArea(circles=tuple(circles), grid=grid, area=area)


def _cover_radius(center: Point, grid: MapGrid) -> float:
    """Radius from center beyond which a circle covers every grid cell."""
    return max(distance(center, corner) for corner in grid.corners()) + grid.cell_size


def increase_radius(
    ri: float,
    pi_center: Point,
    delta_r: float,
    prior_circles: Sequence[Circle],
    grid: MapGrid,
    rng: Random,
    keep_inside: Optional[Point] = None,
    _probe: Optional[_AreaProbe] = None,
    _target: Optional[float] = None,
    _depth: int = 0,
) -> tuple[Point, float]:
    """Grow a circle until the feasible intersection reaches the area its
    input radius would cover unconstrained, randomizing the center on the way.

    The target is the rasterized area of the bare pre-growth circle and stays
    fixed through re-growth rounds, otherwise the randomized center shifts
    could ratchet it up beyond what any map can supply. If the feasible
    intersection already meets it, center and radius are returned unchanged.
    Otherwise the radius grows in delta_r steps, the center is shifted
    per-axis by a uniform amount bounded by this round's growth (redrawn
    while it would evict keep_inside from the circle), the grown radius is
    re-checked from the shifted center (recursing on a shortfall), and
    finally shrunk back in delta_r steps to the smallest compliant value.
    """
    if delta_r <= 0:
        raise ValueError(f"growth step must be positive, got {delta_r}")
    probe = _probe if _probe is not None else _AreaProbe(grid, prior_circles)
    target = _target if _target is not None else lattice_circle_area(Circle(pi_center, ri), grid)
    if probe.area(Circle(pi_center, ri)) >= target:
        return pi_center, ri

    r_pre = ri
    r = ri
    max_r = _cover_radius(pi_center, grid)
    while probe.area(Circle(pi_center, r)) < target:
        if r > max_r:
            raise InfeasibleMapError(
                f"feasible map area cannot reach the target {target:.3f} m^2 "
                f"even with the circle covering the whole grid"
            )
        r += delta_r

    bound = r - r_pre
    shifted = pi_center
    for _ in range(_MAX_SHIFT_DRAWS):
        candidate = Point(
            pi_center.x + rng.uniform(-bound, bound),
            pi_center.y + rng.uniform(-bound, bound),
        )
        if keep_inside is None or distance(candidate, keep_inside) <= r:
            shifted = candidate
            break

    if probe.area(Circle(shifted, r)) < target:
        if _depth >= _MAX_GROW_DEPTH:
            raise InfeasibleMapError(
                "center randomization could not be reconciled with the area target; "
                "the feasible map is too small"
            )
        return increase_radius(
            r, shifted, delta_r, prior_circles, grid, rng, keep_inside, probe, target, _depth + 1
        )

    while r - delta_r > 0 and probe.area(Circle(shifted, r - delta_r)) >= target:
        if keep_inside is not None and distance(shifted, keep_inside) > r - delta_r:
            break
        r -= delta_r
    return shifted, r


def _draw_csps_shift(
    p_prev: Point, r_prev: float, r_nominal: float, pi: Point, rng: Random
) -> Point:
    """Next circle center: shift length at most 2 * r_prev, keeping pi inside
    the nominal-radius circle. Falls back to centering on pi if draws starve."""
    for _ in range(_MAX_VECTOR_DRAWS):
        length = rng.uniform(0.0, 2.0 * r_prev)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        candidate = Point(p_prev.x + length * math.cos(angle), p_prev.y + length * math.sin(angle))
        if distance(candidate, pi) <= r_nominal:
            return candidate
    return pi


def generate_csps(
    n: int,
    grid: MapGrid,
    r0: float,
    pi: Point,
    rng: Random,
    growth_step: Optional[float] = None,
) -> ShareSet:
    """Generate map-aware shares whose chain closes on pi.

    Radii follow the open-space schedule r0 * (n - i) / n but are grown
    (master circle included) wherever the feasible intersection of the map
    and the chain prefix falls short of the unconstrained-circle target, so
    an attacker intersecting the published circles with the map gains
    nothing. The schedule always references the requested r0, not grown
    radii: each area target is then strictly below the area the previous
    prefix already guarantees, which keeps every growth loop satisfiable.
    Raises InfeasibleMapError when the map cannot supply the areas.
    """
    if n < 1:
        raise ValueError(f"share count n must be >= 1, got {n}")
    if r0 <= 0 or not math.isfinite(r0):
        raise ValueError(f"master radius r0 must be positive, got {r0}")
    if not grid.is_feasible(pi):
        raise ValueError("the grid cell containing pi must be feasible")
    step = growth_step if growth_step is not None else r0 / (10.0 * n)

    p0 = random_point_in_disk(pi, r0, rng)
    radius0 = r0
    target0 = lattice_circle_area(Circle(p0, radius0), grid)
    probe = _AreaProbe(grid, ())
    guard = 0
    while probe.area(Circle(p0, radius0)) < target0:
        p0, radius0 = increase_radius(radius0, p0, step, (), grid, rng, keep_inside=pi, _probe=probe)
        guard += 1
        if guard > _MAX_GROW_DEPTH:
            raise InfeasibleMapError("master circle cannot reach its area target")

    circles = [Circle(p0, radius0)]
    refinements: list[RefinementShare] = []
    p_prev, r_prev = p0, radius0
    for i in range(1, n):
        r_nominal = r0 * (n - i) / n
        p_i = _draw_csps_shift(p_prev, r_prev, r_nominal, pi, rng)
        target_i = lattice_circle_area(Circle(p_i, r_nominal), grid)
        probe = _AreaProbe(grid, circles)
        r_i = r_nominal
        guard = 0
        while probe.area(Circle(p_i, r_i)) < target_i:
            p_i, r_i = increase_radius(
                r_i, p_i, step, tuple(circles), grid, rng, keep_inside=pi, _probe=probe
            )
            guard += 1
            if guard > _MAX_GROW_DEPTH:
                raise InfeasibleMapError(f"circle {i} cannot reach its area target")
        refinements.append(RefinementShare(p_i - p_prev, radius=r_i))
        circles.append(Circle(p_i, r_i))
        p_prev, r_prev = p_i, r_i

    refinements.append(RefinementShare(pi - p_prev, radius=0.0))
    master = MasterShare(Circle(p0, radius0))
    return ShareSet(master=master, refinements=tuple(refinements), delta_r=r0 / n, mode=CSPS)
