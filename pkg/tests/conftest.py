"""Shared fixtures: feasibility grids and closeness helpers."""

from __future__ import annotations

import math
from random import Random

import numpy as np
import pytest

from posshare import Point, all_true_grid
from posshare.mapgrid import MapGrid


def assert_point_close(a: Point, b: Point, scale: float, rel: float = 1e-9) -> None:
    """Distance between points within rel * max(1, scale)."""
    from posshare import distance

    assert distance(a, b) <= rel * max(1.0, scale), f"{a} !~ {b} at scale {scale}"


@pytest.fixture
def grid_all_true() -> MapGrid:
    return all_true_grid(140, 140, Point(-70.0, -70.0), 1.0)


@pytest.fixture
def grid_half_plane() -> MapGrid:
    cells = np.zeros((140, 140), dtype=bool)
    cells[:, 70:] = True  # feasible for x >= 0
    return MapGrid(Point(-70.0, -70.0), 1.0, cells)


@pytest.fixture
def grid_random_half() -> MapGrid:
    rng = np.random.default_rng(20240817)
    cells = rng.random((140, 140)) < 0.5
    cells[70, 70] = True  # keep the cell holding the test position feasible
    return MapGrid(Point(-70.0, -70.0), 1.0, cells)


def single_cell_grid() -> MapGrid:
    """All cells infeasible except the one containing (0.5, 0.5)."""
    cells = np.zeros((40, 40), dtype=bool)
    cells[20, 20] = True
    return MapGrid(Point(-20.0, -20.0), 1.0, cells)


def perimeter_band(radius: float, cell_size: float) -> float:
    """Rasterization tolerance: one cell-perimeter worth of area."""
    return 2.0 * math.pi * max(radius, cell_size) * cell_size


@pytest.fixture
def rng() -> Random:
    return Random(20240817)
