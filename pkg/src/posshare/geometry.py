"""Planar geometry primitives shared by the whole package.

All coordinates are meters on a local plane. Areas of circle intersections
(optionally against a feasibility raster) are measured by counting raster
cell centers, which is what the map-aware share algebra needs anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from .mapgrid import MapGrid

EARTH_RADIUS_M = 6_371_000.0

#: cell edge used when measuring areas without an explicit grid
DEFAULT_RASTER_CELL_M = 1.0
#: auto-coarsen the implicit raster beyond this many cells
_MAX_RASTER_CELLS = 4_000_000


@dataclass(frozen=True)
class Point:
    """A position on the local plane, in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def __add__(self, other: "Vector") -> "Point":
        return Point(self.x + other.dx, self.y + other.dy)

    def __sub__(self, other: "Point") -> "Vector":
        return Vector(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Vector:
    """A displacement on the local plane, in meters."""

    dx: float
    dy: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dx) and math.isfinite(self.dy)):
            raise ValueError(f"vector components must be finite, got ({self.dx}, {self.dy})")

    def __add__(self, other: "Vector") -> "Vector":
        return Vector(self.dx + other.dx, self.dy + other.dy)

    @property
    def length(self) -> float:
        return math.hypot(self.dx, self.dy)


@dataclass(frozen=True)
class Circle:
    """A circular obfuscation area; the radius is the position's precision."""

    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.radius) or self.radius < 0:
            raise ValueError(f"circle radius must be finite and non-negative, got {self.radius}")


def distance(a: Point, b: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(a.x - b.x, a.y - b.y)


def circle_area(c: Circle) -> float:
    """Exact area pi * r**2 of a circle."""
    return math.pi * c.radius * c.radius


def contains(c: Circle, p: Point) -> bool:
    """True iff p lies in the circle, boundary inclusive."""
    return distance(c.center, p) <= c.radius


def _intersection_bbox(circles: Sequence[Circle]) -> Optional[tuple[float, float, float, float]]:
    """Bounding box of the common intersection, or None when provably empty."""
    xmin = max(c.center.x - c.radius for c in circles)
    xmax = min(c.center.x + c.radius for c in circles)
    ymin = max(c.center.y - c.radius for c in circles)
    ymax = min(c.center.y + c.radius for c in circles)
    if xmin > xmax or ymin > ymax:
        return None
    return xmin, xmax, ymin, ymax


def _mask_circles(xs: np.ndarray, ys: np.ndarray, circles: Sequence[Circle]) -> np.ndarray:
    """Boolean matrix over the (ys, xs) mesh: cell centers inside every circle."""
    mask = np.ones((ys.size, xs.size), dtype=bool)
    for c in circles:
        dx = xs[None, :] - c.center.x
        dy = ys[:, None] - c.center.y
        mask &= dx * dx + dy * dy <= c.radius * c.radius
    return mask


def intersection_area(
    circles: Sequence[Circle],
    grid: Optional["MapGrid"] = None,
    cell_size: float = DEFAULT_RASTER_CELL_M,
) -> float:
    """Area of the common intersection of circles, optionally clipped to a map.

    The area is measured by counting cells whose center lies in every circle
    (and, when a grid is given, whose cell is marked feasible), so results
    carry a rasterization error on the order of the total circle perimeter
    times the cell size. Without a grid the lattice is anchored at the
    coordinate origin so that adding circles can only remove cells; very
    large extents coarsen the implicit lattice to keep memory bounded.
    """
    if not circles:
        raise ValueError("intersection_area needs at least one circle")
    bbox = _intersection_bbox(circles)
    if bbox is None:
        return 0.0
    xmin, xmax, ymin, ymax = bbox

    if grid is not None:
        cs = grid.cell_size
        i0 = max(0, int(math.floor((xmin - grid.origin.x) / cs)))
        i1 = min(grid.width, int(math.floor((xmax - grid.origin.x) / cs)) + 1)
        j0 = max(0, int(math.floor((ymin - grid.origin.y) / cs)))
        j1 = min(grid.height, int(math.floor((ymax - grid.origin.y) / cs)) + 1)
        if i0 >= i1 or j0 >= j1:
            return 0.0
        xs = grid.origin.x + (np.arange(i0, i1) + 0.5) * cs
        ys = grid.origin.y + (np.arange(j0, j1) + 0.5) * cs
        mask = grid.cells[j0:j1, i0:i1] & _mask_circles(xs, ys, circles)
        return float(mask.sum()) * cs * cs

    h = cell_size
    if h <= 0:
        raise ValueError("cell_size must be positive")
    while ((xmax - xmin) / h + 2) * ((ymax - ymin) / h + 2) > _MAX_RASTER_CELLS:
        h *= 2.0
    i0 = int(math.floor(xmin / h))
    i1 = int(math.floor(xmax / h)) + 1
    j0 = int(math.floor(ymin / h))
    j1 = int(math.floor(ymax / h)) + 1
    xs = (np.arange(i0, i1) + 0.5) * h
    ys = (np.arange(j0, j1) + 0.5) * h
    mask = _mask_circles(xs, ys, circles)
    return float(mask.sum()) * h * h


def lattice_circle_area(c: Circle, grid: "MapGrid") -> float:
    """Rasterized area of a bare circle on the grid's cell lattice.

    Counts lattice cells regardless of their feasibility flag and regardless
    of the stored grid extent, so it serves as the "unconstrained circle"
    area target against which feasible intersections are compared.
    """
    cs = grid.cell_size
    i0 = int(math.floor((c.center.x - c.radius - grid.origin.x) / cs))
    i1 = int(math.floor((c.center.x + c.radius - grid.origin.x) / cs)) + 1
    j0 = int(math.floor((c.center.y - c.radius - grid.origin.y) / cs))
    j1 = int(math.floor((c.center.y + c.radius - grid.origin.y) / cs)) + 1
    xs = grid.origin.x + (np.arange(i0, i1) + 0.5) * cs
    ys = grid.origin.y + (np.arange(j0, j1) + 0.5) * cs
    return float(_mask_circles(xs, ys, [c]).sum()) * cs * cs


def project_to_plane(lat: float, lon: float, lat0: float, lon0: float) -> Point:
    """Equirectangular projection of (lat, lon) around a reference fix.

    Good enough over trajectory-sized extents; x grows east, y grows north.
    """
    x = EARTH_RADIUS_M * math.radians(lon - lon0) * math.cos(math.radians(lat0))
    y = EARTH_RADIUS_M * math.radians(lat - lat0)
    return Point(x, y)
