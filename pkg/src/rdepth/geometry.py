"""Planar hulls, distance to the hull, exact outer level sets and contours."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend
from .core import InvalidDimension, RDepthError, as_cloud, as_point, check_delta, format_number
from .depth import _tukey, direction_grid, max_depth

SEGMENTS_PER_CIRCLE = 64


class CenterTooShallow(RDepthError):
    pass


@dataclass(frozen=True, eq=False)
class HullPolygon:
    """Counterclockwise extreme points; 1 or 2 vertices for degenerate clouds."""

    vertices: np.ndarray

    def __len__(self):
        return len(self.vertices)

    @property
    def diameter(self) -> float:
        v = self.vertices
        if len(v) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2)))


@dataclass(frozen=True, eq=False)
class ContourPolyline:
    """Closed polyline (last vertex joins the first implicitly)."""

    alpha: float
    points: np.ndarray

    def to_csv(self, precision: Optional[int] = None, header: bool = False) -> str:
        lines = (["x,y"] if header else []) + [f"{format_number(x, precision)},{format_number(y, precision)}" for x, y in self.points]
        return "\n".join(lines) + "\n"

    def to_json(self, precision: Optional[int] = None) -> str:
        body = ",".join(f"[{format_number(x, precision)},{format_number(y, precision)}]" for x, y in self.points)
        return f"[{body}]"

    @classmethod
    def from_json(cls, text: str, alpha: float = float("nan")) -> "ContourPolyline":
        return cls(alpha, np.asarray(json.loads(text), dtype=np.float64).reshape(-1, 2))


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(cloud) -> HullPolygon:
    """Andrew's monotone chain; collinear boundary points are dropped."""
    cloud = as_cloud(cloud)
    if cloud.d != 2:
        raise InvalidDimension("convex_hull_2d needs d = 2")
    pts = np.unique(cloud.points, axis=0)  # lexicographic order
    if len(pts) <= 2:
        return HullPolygon(pts.copy())
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    verts = np.array(lower[:-1] + upper[:-1])
    return HullPolygon(verts)


def _segment_distance(z, a, b):
    ab = b - a
    L2 = ab @ ab
    t = 0.0 if L2 == 0 else min(max((z - a) @ ab / L2, 0.0), 1.0)
    return float(np.linalg.norm(z - (a + t * ab)))


def dist_to_hull(z, hull: HullPolygon) -> float:
    """Euclidean distance from ``z`` to the hull; 0 inside or on it."""
    z = as_point(z, 2)
    v = hull.vertices
    if len(v) == 1:
        return float(np.linalg.norm(z - v[0]))
    if len(v) == 2:
        return _segment_distance(z, v[0], v[1])
    nxt = np.roll(v, -1, axis=0)
    cross = (nxt[:, 0] - v[:, 0]) * (z[1] - v[:, 1]) - (nxt[:, 1] - v[:, 1]) * (z[0] - v[:, 0])
    if np.all(cross >= 0):
        return 0.0
    return min(_segment_distance(z, a, b) for a, b in zip(v, nxt))


def outer_depth(z, hull: HullPolygon, delta: float, n: int) -> Optional[float]:
    """``delta / d(z, H)`` when ``d(z, H) >= delta * n``; ``None`` otherwise."""
    delta = check_delta(delta)
    if delta <= 0:
        raise ValueError("outer_depth needs delta > 0")
    d = dist_to_hull(z, hull)
    if d >= delta * n:
        return delta / d
    return None


def offset_polyline(hull: HullPolygon, radius: float, segments_per_circle: int = SEGMENTS_PER_CIRCLE) -> np.ndarray:
    """Boundary of the hull thickened by ``radius``, vertices exactly on it.

    Straight parts are parallel copies of the edges; each hull vertex
    contributes a circular arc spanning its outward normal cone.
    """
    v = hull.vertices
    step = 2 * math.pi / segments_per_circle
    if len(v) == 1:
        t = np.arange(segments_per_circle) * step
        return v[0] + radius * np.column_stack([np.cos(t), np.sin(t)])
    out = []
    k = len(v)
    for i in range(k):
        prev, cur, nxt = v[i - 1], v[i], v[(i + 1) % k]
        e_in, e_out = cur - prev, nxt - cur
        # outward normals of a counterclockwise polygon point right of the edge
        a0 = math.atan2(-e_in[0], e_in[1])
        a1 = math.atan2(-e_out[0], e_out[1])
        span = (a1 - a0) % (2 * math.pi)
        if len(v) == 2 and span == 0.0:
            span = math.pi
        pieces = max(1, int(math.ceil(span / step - 1e-9)))
        for t in a0 + span * np.arange(pieces + 1) / pieces:
            out.append(cur + radius * np.array([math.cos(t), math.sin(t)]))
    return np.array(out)


def _depth_function(cloud, delta, mode, dirs):
    pts = cloud.points
    if mode == "robust":
        if delta == 0.0:
            return lambda z: _tukey(cloud, z, None)[0]
        return lambda z: float(_backend.sup_values(pts, z, dirs, delta).min())
    if mode == "lower":
        return lambda z: float(_backend.inf_values(pts, z, dirs, delta).min())
    if mode == "tukey":
        return lambda z: _tukey(cloud, z, None)[0]
    raise ValueError(f"unknown mode {mode!r}; expected robust, lower or tukey")


def contour_2d(cloud, delta: float, alpha: float, center=None, n_rays: int = 128, mode: str = "robust",
               n_directions: int = 1000, tol: float = 1e-4, exact_outer: bool = True) -> ContourPolyline:
    """Trace ``{z : depth(z) = alpha}`` by radial bisection from a deep center.

    Upper level sets are convex, so along each ray from a point deeper than
    ``alpha`` the depth crosses ``alpha`` once. For the robust depth and
    ``alpha <= 1/n`` the level set is the hull offset by ``delta/alpha``,
    which is emitted directly when ``exact_outer`` is set.
    """
    cloud = as_cloud(cloud)
    if cloud.d != 2:
        raise InvalidDimension("contour_2d needs d = 2")
    delta = check_delta(delta)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if mode == "tukey":
        delta = 0.0
    hull = convex_hull_2d(cloud)
    n = cloud.n
    if mode == "robust" and exact_outer and delta > 0 and alpha <= 1.0 / n:
        return ContourPolyline(alpha, offset_polyline(hull, delta / alpha))
    dirs = direction_grid(2, n_directions)
    depth = _depth_function(cloud, delta, mode, dirs)
    if center is None:
        center = max_depth(cloud, delta, n_directions=n_directions)[1]
    center = as_point(center, 2)
    c_depth = depth(center)
    if c_depth <= alpha:
        raise CenterTooShallow(f"depth {c_depth} at the center does not exceed alpha={alpha}")
    d_max = hull.diameter + dist_to_hull(center, hull) + (delta * n / alpha if delta > 0 else 0.0) + 1.0
    scale = max(d_max, 1.0)
    verts = []
    for t in 2 * math.pi * np.arange(n_rays) / n_rays:
        ray = np.array([math.cos(t), math.sin(t)])
        lo, hi, r = 0.0, d_max, None
        while hi - lo > 1e-12 * scale:
            mid = 0.5 * (lo + hi)
            v = depth(center + mid * ray)
            if abs(v - alpha) <= tol and mode == "robust":
                r = mid
                break
            if v >= alpha:
                lo = mid
            else:
                hi = mid
        verts.append(center + (lo if r is None else r) * ray)
    return ContourPolyline(alpha, np.array(verts))
