"""Full-depth median region in the plane.

A point z has robust depth 1 exactly when no subset of the centered
points ``v_i = x_i - z`` sums to a vector longer than ``delta * n``. The
longest such sum is always attained by the points inside some open
half-plane through the origin, so a rotating sweep over those half-planes
gives the smallest radius with full depth.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import InvalidDimension, RDepthError, as_cloud, as_point, check_delta

SUBSET_ORACLE_LIMIT = 20


class TooLarge(RDepthError):
    pass


def _sorted_nonzero(cloud, z):
    cloud = as_cloud(cloud)
    if cloud.d != 2:
        raise InvalidDimension("the median sweep needs d = 2")
    z = as_point(z, 2)
    vs = cloud.points - z
    keep = np.flatnonzero(np.any(vs != 0.0, axis=1))
    vs = vs[keep]
    theta = np.mod(np.arctan2(vs[:, 1], vs[:, 0]), 2 * np.pi)
    order = np.argsort(theta, kind="stable")
    return cloud, np.ascontiguousarray(theta[order]), np.ascontiguousarray(vs[order])


def min_delta_full_depth_2d(cloud, z) -> float:
    """Smallest delta with robust depth 1 at ``z``."""
    cloud, theta, vs = _sorted_nonzero(cloud, z)
    return _backend.max_window_norm(theta, vs) / cloud.n


def subset_norm_oracle(vs) -> float:
    """max over all 2^n subsets J of ||sum_{i in J} v_i||, by brute force."""
    vs = np.atleast_2d(np.asarray(vs, dtype=np.float64))
    if vs.shape[0] > SUBSET_ORACLE_LIMIT:
        raise TooLarge(f"subset oracle limited to n <= {SUBSET_ORACLE_LIMIT}, got {vs.shape[0]}")
    sums = np.zeros((1, vs.shape[1]))
    for v in vs:
        sums = np.concatenate([sums, sums + v])
    return float(np.sqrt((sums**2).sum(axis=1)).max())


@dataclass(frozen=True, eq=False)
class SeparableSubsets:
    """Nonempty index sets split from their complement by a line.

    ``masks[k]`` marks the members of subset k; ``sums[k]`` is the sum of
    ``x_i - z`` over them and ``sizes[k]`` their number.
    """

    masks: np.ndarray
    sums: np.ndarray
    sizes: np.ndarray

    def __len__(self):
        return len(self.sizes)

    def index_sets(self) -> set:
        return {frozenset(np.flatnonzero(m).tolist()) for m in self.masks}


def enumerate_separable_2d(cloud, z=(0.0, 0.0)) -> SeparableSubsets:
    """All linearly separable subsets, including the full set.

    The ranking of points by projection only changes where the direction
    is orthogonal to a difference ``x_i - x_j``. One direction per arc
    between those critical angles therefore sees every ranking, and the
    separable subsets are the prefixes of these rankings (cut only between
    distinct projection values, so duplicates stay together).
    """
    cloud = as_cloud(cloud)
    if cloud.d != 2:
        raise InvalidDimension("enumerate_separable_2d needs d = 2")
    z = as_point(z, 2)
    pts = cloud.points
    n = cloud.n
    i, j = np.triu_indices(n, 1)
    diff = pts[j] - pts[i]
    diff = diff[np.any(diff != 0.0, axis=1)]
    if diff.shape[0]:
        base = np.arctan2(diff[:, 1], diff[:, 0])
        crit = np.unique(np.mod(np.concatenate([base + np.pi / 2, base - np.pi / 2]), 2 * np.pi))
        nxt = np.append(crit[1:], crit[0] + 2 * np.pi)
        angles = 0.5 * (crit + nxt)
    else:
        angles = np.array([0.0])
    seen = {}
    full = np.ones(n, dtype=bool)
    seen[np.packbits(full).tobytes()] = full
    for a in angles:
        proj = pts @ np.array([np.cos(a), np.sin(a)])
        order = np.argsort(proj, kind="stable")
        ps = proj[order]
        mask = np.zeros(n, dtype=bool)
        for k in range(n - 1):
            mask[order[k]] = True
            if ps[k] < ps[k + 1]:
                key = np.packbits(mask).tobytes()
                if key not in seen:
                    seen[key] = mask.copy()
    masks = np.array(list(seen.values()))
    vs = pts - z
    return SeparableSubsets(masks, masks.astype(np.float64) @ vs, masks.sum(axis=1))


@dataclass(frozen=True, eq=False)
class BallSystem:
    """Balls B_I whose intersection is the full-depth median region."""

    centers: np.ndarray
    radii: np.ndarray

    def __len__(self):
        return len(self.radii)

    def contains(self, z, tol: float = 0.0) -> bool:
        z = as_point(z, self.centers.shape[1])
        dist = np.linalg.norm(self.centers - z, axis=1)
        return bool(np.all(dist <= self.radii + tol))


def ball_system(cloud, delta: float) -> BallSystem:
    """Center mean(x_I) and radius delta*n/|I| for every separable I."""
    cloud = as_cloud(cloud)
    delta = check_delta(delta)
    if delta <= 0:
        raise ValueError("ball_system needs delta > 0")
    sep = enumerate_separable_2d(cloud, np.zeros(2))
    return BallSystem(sep.sums / sep.sizes[:, None], delta * cloud.n / sep.sizes)


def median_membership(cloud, z, delta: float) -> bool:
    """Whether ``z`` has robust depth 1 at radius ``delta``."""
    delta = check_delta(delta)
    if delta <= 0:
        raise ValueError("median_membership needs delta > 0")
    return min_delta_full_depth_2d(cloud, z) <= delta


def count_optimal_subsets(cloud, z, relaxed: bool = False) -> int:
    """Number of distinct sweep windows I with I = {j : <sum_I v, v_j> > 0}.

    These are the local maxima of u -> sum_i <u, v_i>^+ on the circle; the
    global maximizer defining the minimal full-depth radius is one of them.
    ``relaxed`` only asks for {j : <sum_I v, v_j> > 0} to be contained in I,
    a weaker diagnostic count.
    """
    _, theta, vs = _sorted_nonzero(cloud, z)
    n = theta.size
    if n == 0:
        return 0
    start, count, sums = _backend.halfplane_windows(theta, vs)
    found = set()
    for s, c, S in zip(start, count, sums):
        if c == 0:
            continue
        idx = np.mod(np.arange(s, s + c), n)
        key = frozenset(idx.tolist())
        if key in found:
            continue
        positive = frozenset(np.flatnonzero(vs @ S > 0.0).tolist())
        if positive <= key if relaxed else positive == key:
            found.add(key)
    return len(found)


def min_delta_grid(cloud, xs, ys) -> np.ndarray:
    """Rows (x, y, min_delta) with y in the outer loop and x in the inner."""
    cloud = as_cloud(cloud)
    rows = [(x, y, min_delta_full_depth_2d(cloud, (x, y))) for y in ys for x in xs]
    return np.array(rows, dtype=np.float64).reshape(-1, 3)
