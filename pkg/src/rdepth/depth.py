"""Outer minimization over directions: robust, lower and Tukey depth."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtri
from scipy.stats import qmc

from . import _backend
from .core import (
    Direction,
    InvalidDimension,
    PointCloud,
    RDepthError,
    as_cloud,
    as_point,
    check_delta,
    check_seed,
    make_rng,
)
from .inner import ProjectionProfile, worst_case_sup

DEFAULT_DIRECTIONS = 1000
GENERIC_TOL = 1e-9
FD_STEP = 1e-6


class DegenerateDirection(RDepthError):
    """The value function is not differentiable (to tolerance) at this angle."""


class InvalidAlphaBar(RDepthError):
    pass


@dataclass
class DepthQuery:
    z: np.ndarray
    delta: float
    n_directions: int = DEFAULT_DIRECTIONS
    refine: bool = False
    seed: int = 0
    # explicit (count, d) array of unit directions; overrides n_directions/seed
    directions: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.delta = check_delta(self.delta)
        if int(self.n_directions) < 1:
            raise ValueError("n_directions must be >= 1")
        self.n_directions = int(self.n_directions)
        self.seed = check_seed(self.seed)


@dataclass(frozen=True)
class DepthResult:
    depth: float
    argmin_direction: Direction
    evaluations: int
    refined: bool = False


def direction_grid(d: int, count: int = DEFAULT_DIRECTIONS, seed: int = 0) -> np.ndarray:
    """Unit directions as rows of a ``(count, d)`` array.

    d=1 gives the two directions ±1, d=2 equally spaced angles ``2*pi*k/count``,
    d>=3 a scrambled Halton sequence pushed through the normal quantile
    function and normalized. Doubling ``count`` yields a superset.
    """
    if d < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {d}")
    if count < 1:
        raise ValueError("count must be >= 1")
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        # exact zeros on the axes (cos(pi) etc. leave ~1e-16 residue)
        dirs[np.abs(dirs) < 1e-15] = 0.0
        return dirs
    pts = qmc.Halton(d, scramble=True, seed=np.random.default_rng(check_seed(seed))).random(count)
    g = ndtri(np.clip(pts, 1e-15, 1 - 1e-15))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _directions_for(query: DepthQuery, d: int) -> np.ndarray:
    if query.directions is not None:
        dirs = np.atleast_2d(np.asarray(query.directions, dtype=np.float64))
        if dirs.shape[1] != d:
            raise InvalidDimension(f"directions have dimension {dirs.shape[1]}, cloud has {d}")
        return dirs
    return direction_grid(d, query.n_directions, query.seed)


def critical_angles_2d(vs: np.ndarray) -> np.ndarray:
    """Angles of one direction inside every arc of constant halfspace counts.

    Counts of ``<u, v_i> >= 0`` only change where ``u`` is orthogonal to
    some nonzero ``v_i``; the midpoints of the arcs between those angles
    therefore see every value the counts take off the boundaries.
    """
    vs = vs[np.any(vs != 0.0, axis=1)]
    if vs.shape[0] == 0:
        return np.array([0.0])
    base = np.arctan2(vs[:, 1], vs[:, 0])
    crit = np.unique(np.mod(np.concatenate([base + np.pi / 2, base - np.pi / 2]), 2 * np.pi))
    nxt = np.append(crit[1:], crit[0] + 2 * np.pi)
    return np.mod(0.5 * (crit + nxt), 2 * np.pi)


def _angles_to_dirs(theta):
    return np.column_stack([np.cos(theta), np.sin(theta)])


def _tukey(cloud: PointCloud, z: np.ndarray, dirs: Optional[np.ndarray]):
    if dirs is None:
        if cloud.d == 1:
            dirs = direction_grid(1)
        elif cloud.d == 2:
            dirs = _angles_to_dirs(critical_angles_2d(cloud.points - z))
        else:
            raise InvalidDimension("exact Tukey depth is only available for d <= 2")
    counts = _backend.closed_counts(cloud.points, z, dirs)
    j = int(np.argmin(counts))
    return counts[j] / cloud.n, dirs[j], dirs.shape[0]


def tukey_depth(cloud, z, n_directions: int = DEFAULT_DIRECTIONS, seed: int = 0, directions=None) -> float:
    """Empirical halfspace depth (closed halfspaces).

    Exact for d <= 2 unless an explicit ``directions`` grid is given;
    for d >= 3 the minimum runs over ``direction_grid(d, n_directions, seed)``.
    """
    cloud = as_cloud(cloud)
    z = as_point(z, cloud.d)
    if directions is None and cloud.d >= 3:
        directions = direction_grid(cloud.d, n_directions, seed)
    return float(_tukey(cloud, z, directions)[0])


def _scalar_value(diff: np.ndarray, delta: float, theta: float) -> float:
    y = diff @ np.array([math.cos(theta), math.sin(theta)])
    return worst_case_sup(ProjectionProfile.from_projections(y), delta)


def _analytic_gradient(diff: np.ndarray, delta: float, theta: float, tol: float = GENERIC_TOL) -> float:
    n = diff.shape[0]
    c, s = math.cos(theta), math.sin(theta)
    y = diff @ np.array([c, s])
    dy = diff @ np.array([-s, c])
    if np.any(np.abs(y) <= tol):
        raise DegenerateDirection(f"a projection vanishes at theta={theta}")
    pos = np.flatnonzero(y > 0.0)
    order = pos[np.argsort(y[pos], kind="stable")]
    ys = y[order]
    m = ys.size
    target = delta * n
    cs = np.cumsum(ys)
    if m == 0 or cs[-1] < target - tol:
        return 0.0
    if abs(cs[-1] - target) <= tol:
        raise DegenerateDirection(f"total positive mass equals the budget at theta={theta}")
    k0 = int(np.searchsorted(cs, target, side="left"))
    yk = ys[k0]
    if abs(cs[k0] - target) <= tol:
        raise DegenerateDirection(f"partial sum hits the budget at theta={theta}")
    if k0 > 0 and yk - ys[k0 - 1] <= tol:
        raise DegenerateDirection(f"tied projections at the truncation point, theta={theta}")
    if k0 + 1 < m and ys[k0 + 1] - yk <= tol:
        raise DegenerateDirection(f"tied projections at the truncation point, theta={theta}")
    v = (n - m) / n + float(np.sum(1.0 - ys[:k0] / yk)) / n + delta / yk
    coef = v - (n - m + k0) / n
    return -(dy[order[:k0]].sum() / n + coef * dy[order[k0]]) / yk


def _fd_gradient(diff, delta, theta, h=FD_STEP):
    return (_scalar_value(diff, delta, theta + h) - _scalar_value(diff, delta, theta - h)) / (2 * h)


def value_gradient_2d(cloud, z, delta: float, theta: float, fallback: bool = False) -> float:
    """Derivative in ``theta`` of the inner value along ``u = (cos, sin)``.

    Raises :class:`DegenerateDirection` where the value is not smooth
    (vanishing or tied projections at the truncation point, or a partial sum
    equal to ``delta*n``). With ``fallback=True`` a central difference is
    returned there instead.
    """
    cloud = as_cloud(cloud)
    if cloud.d != 2:
        raise InvalidDimension("value_gradient_2d needs d = 2")
    delta = check_delta(delta)
    if delta <= 0:
        raise ValueError("delta must be > 0")
    diff = as_point(z, 2)[None, :] - cloud.points
    try:
        return float(_analytic_gradient(diff, delta, float(theta)))
    except DegenerateDirection:
        if not fallback:
            raise
        return float(_fd_gradient(diff, delta, float(theta)))


def _refine(diff, delta, theta0, max_iter=100, tol=1e-10):
    theta = float(theta0)
    v = _scalar_value(diff, delta, theta)
    evals = 1
    step = 0.05
    for _ in range(max_iter):
        try:
            g = _analytic_gradient(diff, delta, theta)
            evals += 1
        except DegenerateDirection:
            g = _fd_gradient(diff, delta, theta)
            evals += 2
        if abs(g) <= tol:
            break
        t = step
        accepted = False
        while t >= 1e-12:
            cand = theta - t * math.copysign(1.0, g)
            vc = _scalar_value(diff, delta, cand)
            evals += 1
            if vc <= v - 1e-4 * t * abs(g):
                theta, v, accepted = cand, vc, True
                break
            t *= 0.5
        if not accepted:
            break
        step = min(2.0 * t, 0.5)
    return math.remainder(theta, 2 * math.pi) % (2 * math.pi), v, evals


def refine_direction_2d(cloud, z, delta: float, theta0: float, max_iter: int = 100, tol: float = 1e-10):
    """Backtracking descent on ``theta -> v(theta)`` started at ``theta0``.

    Returns ``(theta, value)``; only decreasing steps are accepted, so
    ``value <= v(theta0)``.
    """
    cloud = as_cloud(cloud)
    if cloud.d != 2:
        raise InvalidDimension("refine_direction_2d needs d = 2")
    delta = check_delta(delta)
    diff = as_point(z, 2)[None, :] - cloud.points
    theta, v, _ = _refine(diff, delta, theta0, max_iter, tol)
    return theta, v


def robust_depth(cloud, query: DepthQuery) -> DepthResult:
    """Minimum over directions of the worst-case closed-halfspace mass.

    In d=2 with ``query.refine`` the five best grid directions are polished
    by :func:`refine_direction_2d`. ``delta == 0`` falls through to the
    (exact in d <= 2) Tukey depth.
    """
    cloud = as_cloud(cloud)
    z = as_point(query.z, cloud.d)
    if query.delta == 0.0:
        dirs = query.directions if query.directions is not None else (
            direction_grid(cloud.d, query.n_directions, query.seed) if cloud.d >= 3 else None)
        value, u, evals = _tukey(cloud, z, dirs)
        return DepthResult(float(value), Direction(u), int(evals), False)
    dirs = _directions_for(query, cloud.d)
    values = _backend.sup_values(cloud.points, z, dirs, query.delta)
    j = int(np.argmin(values))
    best, best_u = float(values[j]), dirs[j]
    evals = dirs.shape[0]
    refined = False
    if query.refine and cloud.d == 2:
        diff = z[None, :] - cloud.points
        for idx in np.argsort(values, kind="stable")[:5]:
            theta0 = math.atan2(dirs[idx, 1], dirs[idx, 0])
            theta, v, used = _refine(diff, query.delta, theta0)
            evals += used
            if v < best:
                best, best_u = v, np.array([math.cos(theta), math.sin(theta)])
        refined = True
    return DepthResult(best, Direction(best_u), int(evals), refined)


def lower_depth(cloud, query: DepthQuery) -> DepthResult:
    """Minimum over directions of the best-case open-halfspace mass."""
    cloud = as_cloud(cloud)
    z = as_point(query.z, cloud.d)
    dirs = _directions_for(query, cloud.d)
    values = _backend.inf_values(cloud.points, z, dirs, query.delta)
    j = int(np.argmin(values))
    return DepthResult(float(values[j]), Direction(dirs[j]), int(dirs.shape[0]), False)


def depth_surface(cloud, zs, delta: float, n_directions: int = DEFAULT_DIRECTIONS, seed: int = 0, directions=None):
    """Robust depth at each row of ``zs`` on one shared direction grid."""
    cloud = as_cloud(cloud)
    dirs = directions if directions is not None else direction_grid(cloud.d, n_directions, seed)
    delta = check_delta(delta)
    zs = np.atleast_2d(np.asarray(zs, dtype=np.float64))
    if delta == 0.0:
        return np.array([_tukey(cloud, z, None if cloud.d <= 2 else dirs)[0] for z in zs])
    return np.array([_backend.sup_values(cloud.points, z, dirs, delta).min() for z in zs])


def max_depth(cloud, delta: float, n_directions: int = DEFAULT_DIRECTIONS, seed: int = 0,
              starts: int = 9, max_iter: int = 500, tol: float = 1e-6):
    """Approximate ``max_z D_delta(z)`` by multi-start Nelder-Mead.

    Starts at the coordinate-wise median and ``starts - 1`` seeded
    perturbations of it. Upper level sets are convex, so local search is
    adequate; the returned value is attained at the returned point and is
    therefore a lower bound on the true maximum (up to the direction grid).

    Returns ``(alpha_bar, argmax_z)``.
    """
    cloud = as_cloud(cloud)
    delta = check_delta(delta)
    pts = cloud.points
    dirs = direction_grid(cloud.d, n_directions, seed)

    def depth_at(z):
        if delta == 0.0:
            return _tukey(cloud, z, None if cloud.d <= 2 else dirs)[0]
        return float(_backend.sup_values(pts, z, dirs, delta).min())

    center = np.median(pts, axis=0)
    scale = pts.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    rng = make_rng(seed)
    inits = [center] + [center + 0.5 * scale * rng.standard_normal(cloud.d) for _ in range(starts - 1)]

    best_val, best_z = -1.0, center
    for z0 in inits:
        v0 = depth_at(z0)
        if v0 > best_val:
            best_val, best_z = v0, z0
        if best_val >= 1.0:
            break
        simplex = np.vstack([z0] + [z0 + 0.1 * scale[i] * np.eye(cloud.d)[i] for i in range(cloud.d)])
        res = minimize(lambda z: -depth_at(z), z0, method="Nelder-Mead",
                       options={"maxiter": max_iter, "fatol": tol, "xatol": tol * float(scale.mean()),
                                "initial_simplex": simplex})
        if -res.fun > best_val:
            best_val, best_z = float(-res.fun), np.array(res.x)
        if best_val >= 1.0:
            break
    return float(best_val), np.asarray(best_z, dtype=np.float64)


def alpha_star(delta: float, alpha_bar_fn: Callable[[float], float], tol: float = 1e-10) -> float:
    """Root of ``a / (1 - a) = alpha_bar(delta / (1 - a))`` on (0, 1/2].

    Returns exactly 1/2 when ``alpha_bar(2 * delta) == 1``.
    """
    delta = check_delta(delta)

    def bar(x):
        v = float(alpha_bar_fn(x))
        if not 0.0 < v <= 1.0:
            raise InvalidAlphaBar(f"maximal depth must lie in (0, 1], got {v} at delta={x}")
        return v

    if bar(2.0 * delta) >= 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid / (1.0 - mid) < bar(delta / (1.0 - mid)):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
