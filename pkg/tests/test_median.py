import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import MultiPoint

from rdepth.core import PointCloud
from rdepth.depth import DepthQuery, robust_depth
from rdepth.median import (
    TooLarge,
    ball_system,
    count_optimal_subsets,
    enumerate_separable_2d,
    median_membership,
    min_delta_full_depth_2d,
    min_delta_grid,
    subset_norm_oracle,
)

TWO = PointCloud([[1, 1], [1, -1]])


def separable_brute_force(pts):
    # finite sets split by a line exactly when their hulls are disjoint
    n = len(pts)
    out = set()
    for r in range(1, n + 1):
        for I in itertools.combinations(range(n), r):
            rest = [i for i in range(n) if i not in I]
            if not rest or MultiPoint([tuple(pts[i]) for i in I]).convex_hull.disjoint(
                    MultiPoint([tuple(pts[i]) for i in rest]).convex_hull):
                out.add(frozenset(I))
    return out


def local_maxima_count(vs, grid=400_000):
    th = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    f = np.maximum(vs @ np.stack([np.cos(th), np.sin(th)]), 0).sum(axis=0)
    return int(np.sum((f > np.roll(f, 1)) & (f >= np.roll(f, -1))))


def test_single_point():
    assert min_delta_full_depth_2d(PointCloud([[3, 4]]), [0, 0]) == 5.0


def test_two_point():
    assert min_delta_full_depth_2d(TWO, [0, 0]) == 1.0
    assert robust_depth(TWO, DepthQuery([0, 0], 1.0)).depth == 1.0
    assert robust_depth(TWO, DepthQuery([0, 0], 0.99)).depth < 1.0


def test_equilateral_triangle():
    r = 2.0
    tri = [[r * math.cos(a), r * math.sin(a)] for a in (0, 2 * math.pi / 3, 4 * math.pi / 3)]
    assert min_delta_full_depth_2d(PointCloud(tri), [0, 0]) == pytest.approx(r / 3, abs=1e-12)


def test_points_at_z_are_ignored_but_counted_in_n():
    cloud = PointCloud([[3, 4], [0, 0]])
    assert min_delta_full_depth_2d(cloud, [0, 0]) == 2.5


def test_oracle_small_cases():
    assert subset_norm_oracle([[1, 0], [0, 1], [1, 1]]) == pytest.approx(math.sqrt(8))
    assert subset_norm_oracle([[2, 1], [-2, -1]]) == pytest.approx(math.sqrt(5))


def test_oracle_too_large():
    with pytest.raises(TooLarge):
        subset_norm_oracle(np.ones((21, 2)))


def test_sweep_equals_oracle():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 13))
        pts = rng.standard_normal((n, 2))
        z = rng.standard_normal(2) * 0.5
        assert abs(min_delta_full_depth_2d(PointCloud(pts), z) * n - subset_norm_oracle(pts - z)) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=10))
def test_sweep_equals_oracle_degenerate(pts):
    # integer grids give collinear, antipodal and coincident vectors
    pts = np.array(pts, dtype=float)
    assert abs(min_delta_full_depth_2d(PointCloud(pts), [0, 0]) * len(pts) - subset_norm_oracle(pts)) <= 1e-9


def test_separable_triangle():
    assert len(enumerate_separable_2d(PointCloud([[0, 0], [1, 0], [0, 1]]))) == 7


def test_separable_collinear():
    sep = enumerate_separable_2d(PointCloud([[0, 0], [1, 0], [2, 0], [3, 0]]))
    assert sep.index_sets() == {frozenset(s) for s in
                                [{0}, {0, 1}, {0, 1, 2}, {3}, {2, 3}, {1, 2, 3}, {0, 1, 2, 3}]}


def test_separable_against_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(1, 11))
        pts = rng.standard_normal((n, 2))
        if rng.uniform() < 0.3:
            pts[: n // 2] = pts[0]
        sep = enumerate_separable_2d(PointCloud(pts))
        assert sep.index_sets() == separable_brute_force(pts)
        assert np.allclose(sep.sums, sep.masks.astype(float) @ pts)


def test_windows_are_separable():
    rng = np.random.default_rng(2)
    for _ in range(20):
        pts = rng.standard_normal((8, 2))
        sets = separable_brute_force(pts)
        sep = enumerate_separable_2d(PointCloud(pts), [0, 0])
        assert sep.index_sets() <= sets


def test_membership_examples():
    assert median_membership(TWO, [0, 0], 1.0)
    assert not median_membership(TWO, [0, 0], 0.999)
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((15, 2))
    c = pts.mean(axis=0)
    delta = float(np.max(np.linalg.norm(pts - c, axis=1)) * 15)
    assert median_membership(PointCloud(pts), c, delta)
    assert not median_membership(PointCloud(pts), c + [50, 0], 1.0)


def test_membership_equivalent_to_full_depth():
    rng = np.random.default_rng(4)
    agree = 0
    for _ in range(100):
        n = int(rng.integers(2, 12))
        cloud = PointCloud(rng.standard_normal((n, 2)))
        z = rng.standard_normal(2) * 0.3
        md = min_delta_full_depth_2d(cloud, z)
        delta = md * float(rng.choice([0.8, 0.95, 1.0, 1.05, 1.3]))
        full = robust_depth(cloud, DepthQuery(z, delta, n_directions=3600, refine=True)).depth >= 1 - 1e-4
        agree += full == median_membership(cloud, z, delta)
    assert agree == 100


def test_ball_system_agrees_with_sweep():
    rng = np.random.default_rng(5)
    pts = rng.standard_normal((9, 2))
    cloud = PointCloud(pts)
    bs = ball_system(cloud, 0.4)
    assert all(r > 0 for r in bs.radii)
    for _ in range(300):
        z = rng.standard_normal(2) * 0.5
        md = min_delta_full_depth_2d(cloud, z)
        if abs(md - 0.4) > 1e-9:
            assert bs.contains(z) == (md <= 0.4)


def test_membership_monotone_and_convex():
    rng = np.random.default_rng(6)
    cloud = PointCloud(rng.standard_normal((12, 2)))
    for _ in range(100):
        z1, z2 = rng.standard_normal(2) * 0.5, rng.standard_normal(2) * 0.5
        d1, d2 = sorted(rng.uniform(0.1, 1.0, 2))
        if median_membership(cloud, z1, d1):
            assert median_membership(cloud, z1, d2)
        if median_membership(cloud, z1, d1) and median_membership(cloud, z2, d1):
            assert median_membership(cloud, 0.5 * (z1 + z2), d1)


def test_large_delta_region_is_ball_around_centroid():
    rng = np.random.default_rng(7)
    pts = rng.standard_normal((6, 2))
    c = pts.mean(axis=0)
    delta = 1e3
    for _ in range(50):
        u = rng.standard_normal(2)
        u /= np.linalg.norm(u)
        assert median_membership(PointCloud(pts), c + 0.999 * delta * u, delta)
        assert not median_membership(PointCloud(pts), c + 1.001 * delta * u, delta)


def test_count_examples():
    assert count_optimal_subsets(PointCloud([[1, 2]]), [0, 0]) == 1
    assert count_optimal_subsets(PointCloud([[1, 0], [-1, 0]]), [0, 0]) == 2


def test_count_is_number_of_local_maxima():
    rng = np.random.default_rng(8)
    for _ in range(10):
        pts = rng.standard_normal((60, 2))
        assert count_optimal_subsets(PointCloud(pts), [0, 0]) == local_maxima_count(pts)


def test_count_bounded_and_relaxed_dominates():
    rng = np.random.default_rng(9)
    for _ in range(20):
        cloud = PointCloud(rng.standard_normal((100, 2)))
        strict = count_optimal_subsets(cloud, [0, 0])
        assert 1 <= strict <= count_optimal_subsets(cloud, [0, 0], relaxed=True) <= 200


def test_grid_rows_order():
    g = min_delta_grid(TWO, [0.0, 1.0], [-1.0, 0.0, 1.0])
    assert g.shape == (6, 3)
    assert list(g[:, 0]) == [0, 1, 0, 1, 0, 1] and list(g[:, 1]) == [-1, -1, 0, 0, 1, 1]
    assert g[3, 2] == min_delta_full_depth_2d(TWO, [1, 0])


def test_grid_increases_away_from_median():
    cloud = PointCloud([[0, 0], [4, 0], [1, 3]])
    c = cloud.points.mean(axis=0)
    vals = [min_delta_full_depth_2d(cloud, c + t * np.array([1.0, 0.3])) for t in (0, 1, 3, 10)]
    assert all(a < b for a, b in zip(vals[1:], vals[2:]))
