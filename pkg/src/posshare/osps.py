"""Open-space position sharing: generation and fusion with no map knowledge.

The master circle is public; every refinement share shifts the circle center
and shrinks the radius by the fixed step delta_r = r0 / n. Fusing any k
shares therefore yields radius r0 - k * delta_r regardless of which shares
(or in which order) were fused, and fusing all n recovers the exact position.
"""

from __future__ import annotations

import math
from random import Random
from typing import Sequence

from .geometry import Circle, Point, Vector, distance
from .shares import OSPS, MasterShare, RefinementShare, ShareSet

#: do-while restarts before drawing a fresh master center
_MAX_CHAIN_RETRIES = 10_000
#: rejection draws per shift vector; starving here means the master center
#: pinned pi against a circle boundary, so generation restarts from a fresh
#: master instead of burning retries on a doomed chain
_MAX_VECTOR_DRAWS = 1_000


def fuse_osps(n: int, master: MasterShare, shares: Sequence[RefinementShare]) -> Circle:
    """Fuse k <= n refinement shares with the master circle.

    The center is the master center translated by every shift (summed with
    fsum, so any fusion order gives the bit-identical result); the radius is
    r0 - k * (r0 / n), exactly 0.0 at k = n.
    """
    if n < 1:
        raise ValueError(f"share count n must be >= 1, got {n}")
    k = len(shares)
    if k > n:
        raise ValueError(f"cannot fuse {k} shares from a set of {n}")
    r0 = master.circle.radius
    cx = math.fsum([master.circle.center.x] + [s.shift.dx for s in shares])
    cy = math.fsum([master.circle.center.y] + [s.shift.dy for s in shares])
    radius = 0.0 if k == n else r0 - k * (r0 / n)
    return Circle(Point(cx, cy), radius)


def random_point_in_disk(center: Point, radius: float, rng: Random) -> Point:
    """Uniform point in a disk via rejection sampling from the bounding square."""
    while True:
        dx = rng.uniform(-radius, radius)
        dy = rng.uniform(-radius, radius)
        if dx * dx + dy * dy <= radius * radius:
            return Point(center.x + dx, center.y + dy)


_TWO_PI = 2.0 * math.pi


def _draw_chain(p0: Point, pi: Point, n: int, r0: float, delta_r: float, rng: Random):
    """One attempt at shifts s_1..s_{n-1}, each with length uniform in
    [0, delta_r], direction uniform, keeping pi inside the shrunk circle.
    Returns (shifts, chain end point) or None if a draw starves. Works on
    raw floats: this loop dominates generation time."""
    px, py = p0.x, p0.y
    shifts: list[Vector] = []
    for i in range(1, n):
        radius_i = r0 - i * delta_r
        limit = radius_i * radius_i
        for _ in range(_MAX_VECTOR_DRAWS):
            length = rng.uniform(0.0, delta_r)
            angle = rng.uniform(0.0, _TWO_PI)
            vx = length * math.cos(angle)
            vy = length * math.sin(angle)
            dx = px + vx - pi.x
            dy = py + vy - pi.y
            if dx * dx + dy * dy <= limit:
                shifts.append(Vector(vx, vy))
                px += vx
                py += vy
                break
        else:
            return None
    return shifts, Point(px, py)


def generate_osps(pi: Point, n: int, r0: float, rng: Random) -> ShareSet:
    """Generate a master circle and n refinement shares whose chain closes on pi.

    The master center is uniform over the disk of radius r0 around pi, so pi
    sits inside the public circle. Each of the first n-1 shifts has length at
    most delta_r and keeps pi inside the intermediate circle; the whole chain
    is redrawn until its end lands within delta_r of pi, at which point the
    final shift closes the chain exactly. A bounded retry count restarts from
    a fresh master center so generation always terminates.
    """
    if n < 1:
        raise ValueError(f"share count n must be >= 1, got {n}")
    if r0 <= 0 or not math.isfinite(r0):
        raise ValueError(f"master radius r0 must be positive, got {r0}")
    delta_r = r0 / n
    while True:
        p0 = random_point_in_disk(pi, r0, rng)
        for _ in range(_MAX_CHAIN_RETRIES):
            drawn = _draw_chain(p0, pi, n, r0, delta_r, rng)
            if drawn is None:
                break  # hopeless master placement; restart with a fresh one
            shifts, end = drawn
            if distance(end, pi) <= delta_r:
                closing = pi - end
                refinements = tuple(RefinementShare(v) for v in [*shifts, closing])
                master = MasterShare(Circle(p0, r0))
                return ShareSet(master=master, refinements=refinements, delta_r=delta_r, mode=OSPS)
