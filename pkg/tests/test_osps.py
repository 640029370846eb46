import itertools
import math
from random import Random

import pytest

from posshare import Circle, Point, Vector, distance, fuse_osps, generate_osps
from posshare.shares import MasterShare, RefinementShare, ShareSet

from conftest import assert_point_close


def _master(x=0.0, y=0.0, r=20000.0):
    return MasterShare(Circle(Point(x, y), r))


def test_fuse_matches_shift_and_radius_schedule():
    # n = 4, r0 = 20 km, delta_r = 5 km
    fused = fuse_osps(4, _master(), [RefinementShare(Vector(3000, 4000))])
    assert fused.center == Point(3000, 4000)
    assert fused.radius == 15000.0


def test_fuse_no_shares_is_master_circle():
    fused = fuse_osps(4, _master(), [])
    assert fused.center == Point(0, 0)
    assert fused.radius == 20000.0


def test_fuse_order_independent_exactly():
    shares = [
        RefinementShare(Vector(1234.567, -890.123)),
        RefinementShare(Vector(-345.678, 901.234)),
        RefinementShare(Vector(42.42, 4242.42)),
    ]
    results = {fuse_osps(4, _master(), list(p)) for p in itertools.permutations(shares)}
    assert len(results) == 1


def test_fuse_rejects_too_many_shares():
    shares = [RefinementShare(Vector(0, 0))] * 3
    with pytest.raises(ValueError):
        fuse_osps(2, _master(), shares)


def test_generate_single_share_closes_chain():
    pi = Point(0.0, 0.0)
    share_set = generate_osps(pi, 1, 100.0, Random(5))
    p0 = share_set.master.circle.center
    only = share_set.refinements[0].shift
    assert only.dx == pi.x - p0.x
    assert only.dy == pi.y - p0.y


def test_generate_respects_shift_bound_and_recovers_pi():
    pi = Point(812.5, -4077.25)
    share_set = generate_osps(pi, 4, 20000.0, Random(11))
    assert all(s.shift.length <= 5000.0 * (1 + 1e-12) for s in share_set.refinements)
    fused = fuse_osps(share_set.n, share_set.master, share_set.refinements)
    assert_point_close(fused.center, pi, 20000.0)
    assert fused.radius == 0.0


def test_generate_deterministic_for_seed():
    a = generate_osps(Point(1, 2), 5, 1000.0, Random(99))
    b = generate_osps(Point(1, 2), 5, 1000.0, Random(99))
    assert a == b


def test_fused_radius_depends_only_on_count():
    share_set = generate_osps(Point(0, 0), 5, 1000.0, Random(3))
    for k in range(6):
        radii = {
            fuse_osps(5, share_set.master, list(combo)).radius
            for combo in itertools.combinations(share_set.refinements, k)
        }
        assert len(radii) == 1
        expected = 0.0 if k == 5 else 1000.0 - k * (1000.0 / 5)
        assert radii == {expected}


def test_containment_chain():
    pi = Point(-3.25, 7.5)
    for seed in range(25):
        share_set = generate_osps(pi, 6, 300.0, Random(seed))
        circle = fuse_osps(6, share_set.master, [])
        assert distance(circle.center, pi) <= circle.radius * (1 + 1e-12)
        for k in range(1, 7):
            circle = fuse_osps(6, share_set.master, share_set.refinements[:k])
            assert distance(circle.center, pi) <= circle.radius * (1 + 1e-12) + 1e-9


def test_master_centers_cover_all_quadrants():
    # chi-square on quadrant counts of p0 - pi; df=3, p > 0.001 below 16.266
    pi = Point(10.0, -20.0)
    rng = Random(123)
    counts = [0, 0, 0, 0]
    samples = 10_000
    for _ in range(samples):
        share_set = generate_osps(pi, 2, 50.0, rng)
        p0 = share_set.master.circle.center
        dx, dy = p0.x - pi.x, p0.y - pi.y
        counts[(dx >= 0) * 2 + (dy >= 0)] += 1
    assert all(c > 0 for c in counts)
    expected = samples / 4
    chi2 = sum((c - expected) ** 2 / expected for c in counts)
    assert chi2 < 16.266


def test_share_set_validates_osps_shift_bound():
    with pytest.raises(ValueError, match="exceeding delta_r"):
        ShareSet(
            master=_master(r=100.0),
            refinements=(RefinementShare(Vector(60.0, 0.0)),),
            delta_r=50.0,
        )


def test_generate_rejects_bad_parameters():
    with pytest.raises(ValueError):
        generate_osps(Point(0, 0), 0, 100.0, Random(1))
    with pytest.raises(ValueError):
        generate_osps(Point(0, 0), 3, 0.0, Random(1))


def test_json_round_trip():
    from posshare.shares import share_set_from_json

    share_set = generate_osps(Point(5, 6), 4, 500.0, Random(2))
    doc = share_set.to_json()
    assert share_set_from_json(doc) == share_set
    # field order is part of the wire format
    assert doc.index('"mode"') < doc.index('"n"') < doc.index('"delta_r"')
    assert doc.index('"delta_r"') < doc.index('"master"') < doc.index('"shares"')
