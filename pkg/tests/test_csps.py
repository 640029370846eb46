import math
from random import Random

import numpy as np
import pytest

from posshare import (
    Circle,
    InfeasibleMapError,
    Point,
    Vector,
    distance,
    fuse_csps,
    fuse_osps,
    generate_csps,
    generate_osps,
    increase_radius,
    intersection_area,
)
from posshare.geometry import lattice_circle_area
from posshare.mapgrid import MapGrid
from posshare.shares import RefinementShare

from conftest import perimeter_band, single_cell_grid

PI_TEST = Point(0.3, 0.4)


def _prefix_area_targets(share_set, grid):
    """(measured area, nominal target) per fused-prefix length k = 0..n."""
    r0 = share_set.master.circle.radius
    n = share_set.n
    out = []
    for k in range(n + 1):
        fused = fuse_csps(grid, n, share_set.master.circle, share_set.refinements[:k])
        out.append((fused.area, math.pi * (r0 * (n - k) / n) ** 2))
    return out


def test_fuse_empty_prefix_is_master_intersection(grid_half_plane):
    c0 = Circle(Point(3.0, 1.0), 12.0)
    fused = fuse_csps(grid_half_plane, 4, c0, [])
    assert fused.area == intersection_area([c0], grid_half_plane)
    assert fused.circles == (c0,)


def test_fuse_requires_share_radii(grid_all_true):
    with pytest.raises(ValueError, match="no radius"):
        fuse_csps(grid_all_true, 2, Circle(Point(0, 0), 10.0), [RefinementShare(Vector(1, 1))])


def test_fuse_single_feasible_cell_stays_within_one_cell():
    grid = single_cell_grid()
    pi = Point(0.5, 0.5)
    share_set = generate_csps(3, grid, 0.45, pi, Random(8))
    cell_area = grid.cell_size**2
    for k in range(share_set.n + 1):
        fused = fuse_csps(grid, share_set.n, share_set.master.circle, share_set.refinements[:k])
        assert fused.area <= cell_area + 1e-9


def test_fuse_nested_osps_chain_matches_open_space_area(grid_all_true):
    # an open-space chain is nested, so its map intersection is just the
    # smallest circle; feeding it through the map-aware fusion must agree
    share_set = generate_osps(PI_TEST, 4, 20.0, Random(21))
    radii = [20.0 * (4 - i) / 4 for i in range(1, 5)]
    with_radii = [
        RefinementShare(s.shift, radius=r) for s, r in zip(share_set.refinements, radii)
    ]
    for k in range(5):
        fused = fuse_csps(grid_all_true, 4, share_set.master.circle, with_radii[:k])
        open_space = fuse_osps(4, share_set.master, share_set.refinements[:k])
        band = perimeter_band(open_space.radius, grid_all_true.cell_size)
        assert abs(fused.area - math.pi * open_space.radius**2) <= band


def test_generate_all_true_meets_area_guarantee(grid_all_true):
    for seed in range(20):
        share_set = generate_csps(4, grid_all_true, 18.0, PI_TEST, Random(seed))
        for k, (area, target) in enumerate(_prefix_area_targets(share_set, grid_all_true)):
            band = perimeter_band(math.sqrt(target / math.pi), grid_all_true.cell_size)
            assert area >= target - band, f"seed {seed} prefix {k}: {area} < {target} - {band}"


def test_generate_all_true_radii_never_below_nominal(grid_all_true):
    for seed in range(10):
        share_set = generate_csps(4, grid_all_true, 18.0, PI_TEST, Random(seed))
        r0 = share_set.master.circle.radius
        assert r0 >= 18.0
        for i, share in enumerate(share_set.refinements[:-1], start=1):
            assert share.radius >= r0 * (4 - i) / 4 - 1e-9
        assert share_set.refinements[-1].radius == 0.0


def test_generate_random_half_meets_area_guarantee(grid_random_half):
    for seed in range(15):
        share_set = generate_csps(4, grid_random_half, 15.0, PI_TEST, Random(seed))
        for k, (area, target) in enumerate(_prefix_area_targets(share_set, grid_random_half)):
            band = perimeter_band(math.sqrt(target / math.pi), grid_random_half.cell_size)
            assert area >= target - band, f"seed {seed} prefix {k}"


def test_generate_closes_chain_on_pi(grid_half_plane):
    share_set = generate_csps(4, grid_half_plane, 15.0, PI_TEST, Random(4))
    end = share_set.master.circle.center
    for share in share_set.refinements:
        end = end + share.shift
    assert distance(end, PI_TEST) <= 1e-9


def test_generate_pi_inside_every_circle(grid_random_half):
    for seed in range(10):
        share_set = generate_csps(5, grid_random_half, 15.0, PI_TEST, Random(seed))
        fused = fuse_csps(
            grid_random_half, 5, share_set.master.circle, share_set.refinements[:-1]
        )
        for circle in fused.circles:
            assert distance(circle.center, PI_TEST) <= circle.radius * (1 + 1e-12) + 1e-9


def test_generate_deterministic(grid_random_half):
    a = generate_csps(4, grid_random_half, 15.0, PI_TEST, Random(77))
    b = generate_csps(4, grid_random_half, 15.0, PI_TEST, Random(77))
    assert a == b


def test_generate_rejects_infeasible_start():
    grid = single_cell_grid()
    with pytest.raises(ValueError, match="feasible"):
        generate_csps(3, grid, 5.0, Point(5.5, 5.5), Random(1))


def test_generate_reports_infeasible_map():
    grid = single_cell_grid()
    # target areas of a radius-6 circle can never fit in one feasible cell
    with pytest.raises(InfeasibleMapError):
        generate_csps(3, grid, 6.0, Point(0.5, 0.5), Random(1))


def test_increase_radius_noop_on_all_true(grid_all_true):
    center = Point(2.0, -3.0)
    got_center, got_radius = increase_radius(
        10.0, center, 0.5, (), grid_all_true, Random(3)
    )
    assert got_center == center
    assert got_radius == 10.0


def test_increase_radius_deterministic(grid_half_plane):
    a = increase_radius(10.0, Point(0.0, 0.0), 0.25, (), grid_half_plane, Random(5))
    b = increase_radius(10.0, Point(0.0, 0.0), 0.25, (), grid_half_plane, Random(5))
    assert a == b


def test_increase_radius_half_plane_grows_past_sqrt2():
    """Half the grown circle must supply the whole area target, so the grown
    radius reaches sqrt(2) * r' (one step of slack) whenever the adjusted
    center stays on the infeasible side of the boundary."""
    cells = np.zeros((140, 140), dtype=bool)
    cells[:, 70:] = True
    grid = MapGrid(Point(-70.0, -70.0), 1.0, cells)
    r_pre = 10.0
    step = 0.25
    checked = 0
    for seed in range(40):
        center, radius = increase_radius(r_pre, Point(0.0, 0.0), step, (), grid, Random(seed))
        # post-condition, verified by an independent area scan
        measured = intersection_area([Circle(center, radius)], grid)
        target = lattice_circle_area(Circle(Point(0.0, 0.0), r_pre), grid)
        assert measured >= target - 1e-9
        if center.x <= 0.0:
            band = perimeter_band(radius, grid.cell_size)
            assert math.pi * radius**2 / 2 >= target - band - 1e-9
            assert radius >= math.sqrt(2.0) * r_pre - step - 1.0
            checked += 1
    assert checked >= 5


def test_increase_radius_randomizes_center(grid_half_plane):
    centers = set()
    for seed in range(200):
        center, _ = increase_radius(
            10.0, Point(0.0, 0.0), 0.5, (), grid_half_plane, Random(seed)
        )
        centers.add((center.x, center.y))
    assert len(centers) > 100


def test_increase_radius_keeps_pi_inside(grid_half_plane):
    pin = Point(4.0, 2.0)
    for seed in range(30):
        center, radius = increase_radius(
            8.0, Point(1.0, 1.0), 0.5, (), grid_half_plane, Random(seed), keep_inside=pin
        )
        assert distance(center, pin) <= radius + 1e-9


def test_increase_radius_rejects_bad_step(grid_all_true):
    with pytest.raises(ValueError):
        increase_radius(5.0, Point(0, 0), 0.0, (), grid_all_true, Random(1))


def test_nominal_targets_strictly_decrease(grid_all_true):
    share_set = generate_csps(5, grid_all_true, 20.0, PI_TEST, Random(9))
    r0 = share_set.master.circle.radius
    nominals = [r0 * (5 - i) / 5 for i in range(6)]
    assert all(a > b for a, b in zip(nominals, nominals[1:]))


def test_csps_share_set_serialization_round_trip(grid_random_half):
    from posshare.shares import share_set_from_json

    share_set = generate_csps(3, grid_random_half, 12.0, PI_TEST, Random(13))
    doc = share_set.to_json()
    assert '"r"' in doc
    assert share_set_from_json(doc) == share_set
