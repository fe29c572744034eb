"""Exact solution of the inner worst-case problems for an empirical law.

For a fixed direction ``u`` everything reduces to the projections
``y_i = <u, z - x_i>``: the closed halfspace ``<u, X - z> >= 0`` is
``{Y <= 0}``, and moving mass onto it costs ``y^+`` per unit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .core import DimensionMismatch, Direction, PointCloud, as_point, check_delta

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class ProjectionProfile:
    """Projections of ``z - x_i`` onto one direction, plus sorted positive part.

    ``prefix[0] == 0`` and ``prefix[i]`` is the sum of the ``i`` smallest
    positive projections. Zero projections count toward ``p``.
    """

    y: np.ndarray
    m: int
    p: float
    sorted_pos: np.ndarray
    prefix: np.ndarray

    @property
    def n(self) -> int:
        return self.y.size

    @classmethod
    def from_projections(cls, y) -> "ProjectionProfile":
        y = np.array(y, dtype=np.float64, copy=True).reshape(-1)
        if y.size == 0:
            raise DimensionMismatch("a profile needs at least one projection")
        pos = np.sort(y[y > 0.0], kind="stable")
        prefix = np.concatenate([[0.0], np.cumsum(pos)])
        for arr in (y, pos, prefix):
            arr.flags.writeable = False
        m = pos.size
        return cls(y=y, m=m, p=(y.size - m) / y.size, sorted_pos=pos, prefix=prefix)


@dataclass(frozen=True)
class TruncatedMeanInverse:
    """Generalized inverse of the truncated mean ``h(t) = E[Y 1{0 < Y <= t}]``."""

    lam: float

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError("the truncated-mean inverse is nonnegative")


def project(cloud: PointCloud, z, u) -> ProjectionProfile:
    z = as_point(z, cloud.d)
    u = u if isinstance(u, Direction) else Direction(u)
    if u.d != cloud.d:
        raise DimensionMismatch(f"direction has dimension {u.d}, cloud has dimension {cloud.d}")
    return ProjectionProfile.from_projections((z[None, :] - cloud.points) @ u.u)


def truncated_mean_inverse(profile: ProjectionProfile, delta: float) -> TruncatedMeanInverse:
    """``h^{-1}(delta)``; infinite when the whole positive part costs at most delta."""
    delta = check_delta(delta)
    if delta == 0.0:
        return TruncatedMeanInverse(0.0)
    target = delta * profile.n
    if profile.m == 0 or profile.prefix[-1] <= target:
        return TruncatedMeanInverse(math.inf)
    k = int(np.searchsorted(profile.prefix[1:], target, side="left"))
    return TruncatedMeanInverse(float(profile.sorted_pos[k]))


def worst_case_sup(profile: ProjectionProfile, delta: float) -> float:
    """Largest mass of the closed halfspace over the Wasserstein ball.

    With ``k`` the smallest index such that the ``k`` smallest positive
    projections sum to at least ``delta * n``, the points before ``k`` are
    moved onto the hyperplane and the leftover budget buys a fraction of
    the ``k``-th. Written as ``p + sum_{i<k}(1 - y_i/y_k)/n + delta/y_k``,
    which is exact when all positive projections coincide.
    """
    delta = check_delta(delta)
    n = profile.n
    if delta == 0.0:
        return profile.p
    target = delta * n
    if profile.m == 0 or profile.prefix[-1] <= target:
        return 1.0
    k = int(np.searchsorted(profile.prefix[1:], target, side="left"))
    lam = profile.sorted_pos[k]
    gain = float(np.sum(1.0 - profile.sorted_pos[:k] / lam))
    return min(profile.p + gain / n + delta / lam, 1.0)


def worst_case_inf(profile: ProjectionProfile, delta: float) -> float:
    """Smallest mass of the open halfspace ``{Y < 0}`` over the Wasserstein ball."""
    delta = check_delta(delta)
    y = profile.y
    n = y.size
    if delta == 0.0:
        return float(np.count_nonzero(y < 0.0)) / n
    w = np.sort(-y[y <= 0.0], kind="stable")
    target = delta * n
    cs = np.cumsum(w)
    if w.size == 0 or cs[-1] <= target:
        return 0.0
    k = int(np.searchsorted(cs, target, side="left"))
    lam = w[k]
    loss = float(np.sum(1.0 - w[:k] / lam))
    return max(w.size / n - loss / n - delta / lam, 0.0)


def worst_case_sup_dual(profile: ProjectionProfile, delta: float, grid_size: int = 1000) -> float:
    """Grid minimization of ``delta/l + mean((1 - y^+/l)^+)`` over ``l > 0``.

    Independent check on :func:`worst_case_sup`; the grid holds every
    positive projection, a log-spaced fill, and a huge ``l`` for the case
    where the infimum is only approached as ``l -> inf``.
    """
    delta = check_delta(delta)
    if delta <= 0:
        raise ValueError("the dual form needs delta > 0")
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    yp = np.maximum(profile.y, 0.0)
    pos = yp[yp > 0]
    if pos.size:
        lo, hi = pos.min(), pos.max()
        grid = np.concatenate([pos, np.geomspace(lo, hi, grid_size), [hi * 1e12]])
    else:
        grid = np.array([1.0, 1e12])
    # (n_grid, n) is fine for the profile sizes this is meant for
    with np.errstate(over="ignore"):
        vals = delta / grid + np.maximum(1.0 - yp[None, :] / grid[:, None], 0.0).mean(axis=1)
    return float(min(vals.min(), 1.0))


def _normal_truncated_mean(lam: float, a: float) -> float:
    # int_0^lam x phi(x - a) dx
    phi = lambda t: math.exp(-0.5 * t * t) * INV_SQRT_2PI
    return phi(a) - phi(lam - a) + a * (ndtr(lam - a) - ndtr(-a))


def normal_inner_sup(norm_z: float, delta: float) -> float:
    """Robust depth of a point at distance ``norm_z`` from the center of N(0, I).

    Solves ``int_0^lam x phi(x - |z|) dx = delta`` by bisection and returns
    ``Phi(lam - |z|)``.
    """
    a = float(norm_z)
    if a < 0:
        raise ValueError("norm_z must be >= 0")
    delta = check_delta(delta)
    if delta == 0.0:
        return float(ndtr(-a))
    mean_pos = math.exp(-0.5 * a * a) * INV_SQRT_2PI + a * ndtr(a)
    if delta >= mean_pos:
        return 1.0
    lo, hi = 0.0, a + 40.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _normal_truncated_mean(mid, a) >= delta:
            hi = mid
        else:
            lo = mid
    return float(ndtr(0.5 * (lo + hi) - a))


def normal_max_depth(delta: float) -> float:
    """Maximal robust depth for the standard normal law in any dimension."""
    delta = check_delta(delta)
    if delta >= INV_SQRT_2PI:
        return 1.0
    return float(ndtr(math.sqrt(-2.0 * math.log1p(-delta * math.sqrt(2.0 * math.pi)))))
