"""Binary feasibility raster: where a user can possibly be located.

The on-disk format is a small ASCII header followed by rows of 0/1 flags,
so test fixtures can be written and inspected by hand:

    MGRID
    <width> <height>
    <origin_x> <origin_y>
    <cell_size>
    <row 0: width space-separated flags, bottom row first>
    ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .geometry import Point

_MAGIC = "MGRID"


@dataclass(frozen=True)
class MapGrid:
    """Row-major boolean raster; cells[j, i] covers a cell_size square whose
    lower-left corner sits at origin + (i, j) * cell_size."""

    origin: Point
    cell_size: float
    cells: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.cell_size <= 0 or not math.isfinite(self.cell_size):
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        cells = np.asarray(self.cells, dtype=bool)
        if cells.ndim != 2:
            raise ValueError("cells must be a 2-d boolean matrix")
        object.__setattr__(self, "cells", cells)

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def cell_index(self, p: Point) -> tuple[int, int]:
        """(column, row) of the cell containing p; raises if p is outside."""
        i = int(math.floor((p.x - self.origin.x) / self.cell_size))
        j = int(math.floor((p.y - self.origin.y) / self.cell_size))
        if not (0 <= i < self.width and 0 <= j < self.height):
            raise ValueError(f"point ({p.x}, {p.y}) lies outside the grid extent")
        return i, j

    def is_feasible(self, p: Point) -> bool:
        i, j = self.cell_index(p)
        return bool(self.cells[j, i])

    def true_area(self) -> float:
        return float(self.cells.sum()) * self.cell_size * self.cell_size

    def corners(self) -> tuple[Point, Point, Point, Point]:
        x0, y0 = self.origin.x, self.origin.y
        x1 = x0 + self.width * self.cell_size
        y1 = y0 + self.height * self.cell_size
        return (Point(x0, y0), Point(x1, y0), Point(x0, y1), Point(x1, y1))


def all_true_grid(width: int, height: int, origin: Point = Point(0.0, 0.0), cell_size: float = 1.0) -> MapGrid:
    return MapGrid(origin, cell_size, np.ones((height, width), dtype=bool))


def save_grid(grid: MapGrid, path: Union[str, Path]) -> None:
    lines = [
        _MAGIC,
        f"{grid.width} {grid.height}",
        f"{grid.origin.x!r} {grid.origin.y!r}",
        f"{grid.cell_size!r}",
    ]
    for row in grid.cells:
        lines.append(" ".join("1" if v else "0" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_grid(path: Union[str, Path]) -> MapGrid:
    raw = Path(path).read_text().splitlines()
    if not raw or raw[0].strip() != _MAGIC:
        raise ValueError(f"{path}: not a {_MAGIC} file")
    try:
        width, height = (int(t) for t in raw[1].split())
        ox, oy = (float(t) for t in raw[2].split())
        cell_size = float(raw[3])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path}: malformed grid header: {exc}") from exc
    rows = []
    for lineno, line in enumerate(raw[4 : 4 + height], start=5):
        values = line.split()
        if len(values) != width:
            raise ValueError(f"{path}: line {lineno}: expected {width} cells, got {len(values)}")
        rows.append([v == "1" for v in values])
    if len(rows) != height:
        raise ValueError(f"{path}: expected {height} rows, got {len(rows)}")
    return MapGrid(Point(ox, oy), cell_size, np.array(rows, dtype=bool))
