import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posshare import Point, Vector, Circle, all_true_grid
from posshare.geometry import (
    circle_area,
    contains,
    distance,
    intersection_area,
    lattice_circle_area,
    project_to_plane,
)

coords = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
points = st.builds(Point, coords, coords)
small_coords = st.floats(min_value=-30, max_value=30, allow_nan=False, allow_infinity=False)
radii = st.floats(min_value=0.5, max_value=15, allow_nan=False, allow_infinity=False)
small_circles = st.builds(Circle, st.builds(Point, small_coords, small_coords), radii)


def test_distance_pythagorean_triple():
    assert distance(Point(0, 0), Point(3, 4)) == 5.0


def test_distance_identity():
    assert distance(Point(1, 1), Point(1, 1)) == 0.0


def test_distance_negative_quadrant():
    assert distance(Point(0, 0), Point(-3, -4)) == 5.0


@given(points, points)
def test_distance_symmetric(a, b):
    assert distance(a, b) == distance(b, a)


@given(points)
def test_distance_identity_of_indiscernibles(a):
    assert distance(a, a) == 0.0


@given(points, points, points)
def test_distance_triangle_inequality(a, b, c):
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-6


def test_point_vector_arithmetic():
    assert Point(1, 2) + Vector(3, -1) == Point(4, 1)
    assert Point(4, 1) - Point(1, 2) == Vector(3, -1)
    assert (Vector(1, 2) + Vector(2, 3)) == Vector(3, 5)
    assert Vector(3, 4).length == 5.0


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        Point(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Vector(float("inf"), 0.0)
    with pytest.raises(ValueError):
        Circle(Point(0, 0), -1.0)


def test_circle_area_values():
    assert circle_area(Circle(Point(0, 0), 1.0)) == pytest.approx(math.pi)
    assert circle_area(Circle(Point(0, 0), 0.0)) == 0.0
    assert circle_area(Circle(Point(5, 5), 2.0)) == pytest.approx(4 * math.pi)


def test_contains_boundary_inclusive():
    c = Circle(Point(0, 0), 5.0)
    assert contains(c, Point(3, 4))
    assert not contains(c, Point(3, 4.01))
    assert contains(Circle(Point(0, 0), 0.0), Point(0, 0))


def test_intersection_area_single_circle():
    area = intersection_area([Circle(Point(0, 0), 10.0)])
    band = 2 * math.pi * 10.0 * 1.0
    assert abs(area - 100 * math.pi) <= band


def test_intersection_area_disjoint():
    circles = [Circle(Point(0, 0), 10.0), Circle(Point(30, 0), 10.0)]
    assert intersection_area(circles) == 0.0


def test_intersection_area_nested():
    circles = [Circle(Point(0, 0), 10.0), Circle(Point(0, 0), 5.0)]
    band = 2 * math.pi * 5.0 * 1.0
    assert abs(intersection_area(circles) - 25 * math.pi) <= band


def test_intersection_area_empty_list():
    with pytest.raises(ValueError):
        intersection_area([])


@settings(max_examples=60, deadline=None)
@given(st.lists(small_circles, min_size=1, max_size=4), small_circles)
def test_intersection_area_monotone(circles, extra):
    assert intersection_area(circles + [extra]) <= intersection_area(circles) + 1e-9


def test_intersection_area_all_true_grid_matches_gridless():
    grid = all_true_grid(80, 80, Point(-40, -40), 1.0)
    circles = [Circle(Point(0, 0), 12.0), Circle(Point(5, 3), 9.0)]
    with_grid = intersection_area(circles, grid)
    gridless = intersection_area(circles)
    band = 2 * math.pi * (12.0 + 9.0) * 1.0
    assert abs(with_grid - gridless) <= band


def test_lattice_circle_area_ignores_truth_and_extent():
    import numpy as np
    from posshare.mapgrid import MapGrid

    empty = MapGrid(Point(-40, -40), 1.0, np.zeros((80, 80), dtype=bool))
    c = Circle(Point(0, 0), 10.0)
    assert lattice_circle_area(c, empty) == pytest.approx(100 * math.pi, abs=2 * math.pi * 10)
    # circle centered far outside the stored extent still gets its full area
    far = Circle(Point(500, 500), 10.0)
    assert lattice_circle_area(far, empty) == lattice_circle_area(c, empty)


def test_projection_reference_fix_is_origin():
    p = project_to_plane(48.7758, 9.1829, 48.7758, 9.1829)
    assert p == Point(0.0, 0.0)


def test_projection_meter_scale():
    # one degree of latitude is about 111 km
    p = project_to_plane(48.7758 + 1.0, 9.1829, 48.7758, 9.1829)
    assert p.y == pytest.approx(111_194.9, rel=1e-3)
    assert p.x == 0.0
