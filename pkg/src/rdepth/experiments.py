"""Seeded Monte-Carlo studies: ordering, subset counts, consistency, breakdown."""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import PointCloud, RDepthError, as_cloud, as_point, check_delta, check_seed, round_floats, spawn_rngs
from .depth import DepthQuery, _tukey, direction_grid, max_depth, robust_depth
from .inner import normal_inner_sup
from .median import count_optimal_subsets

MAX_PAIR_DRAWS = 10**6
Z95 = 1.96


class NotSPD(RDepthError):
    pass


class SamplingOverflow(RDepthError):
    pass


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    estimates: dict = field(default_factory=dict)
    wall_seconds: float = 0.0

    def as_dict(self, timing: bool = False) -> dict:
        out = {"name": self.name, "parameters": self.parameters, "estimates": self.estimates}
        if timing:
            out["wall_seconds"] = self.wall_seconds
        return out

    def to_json(self, precision: Optional[int] = None, timing: bool = False) -> str:
        return json.dumps(round_floats(self.as_dict(timing), precision), separators=(",", ":"))

    def to_text(self, precision: Optional[int] = None, timing: bool = False) -> str:
        fmt = (lambda x: f"{x:.{precision}g}") if precision else repr
        lines = [f"experiment  {self.name}"]
        for k, v in self.parameters.items():
            lines.append(f"  {k:<24} {v}")
        width = max([len(k) for k in self.estimates] + [8])
        lines.append(f"  {'estimate':<{width}} {'value':>22} {'ci_low':>22} {'ci_high':>22}")
        for k, e in self.estimates.items():
            cells = [e.get(c) for c in ("value", "ci_low", "ci_high")]
            cells = ["-" if c is None else fmt(c) if isinstance(c, float) else str(c) for c in cells]
            lines.append(f"  {k:<{width}} {cells[0]:>22} {cells[1]:>22} {cells[2]:>22}")
        if timing:
            lines.append(f"  wall_seconds {self.wall_seconds:.3f}")
        return "\n".join(lines) + "\n"


def proportion(successes: int, trials: int) -> dict:
    """Point estimate with the normal-approximation 95% interval."""
    if trials == 0:
        return {"value": None, "ci_low": None, "ci_high": None, "trials": 0}
    p = successes / trials
    half = Z95 * math.sqrt(p * (1 - p) / trials)
    return {"value": p, "ci_low": max(0.0, p - half), "ci_high": min(1.0, p + half), "trials": trials}


def mean_estimate(values) -> dict:
    values = np.asarray(values, dtype=np.float64)
    m = float(values.mean())
    half = Z95 * float(values.std(ddof=1)) / math.sqrt(values.size) if values.size > 1 else 0.0
    return {"value": m, "ci_low": m - half, "ci_high": m + half, "trials": int(values.size)}


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        threads = int(os.environ.get("RDEPTH_THREADS", "1") or 1)
    return max(1, int(threads))


def _map(fn: Callable, items: Sequence, threads: Optional[int]) -> list:
    # results come back in input order whatever the pool size
    threads = resolve_threads(threads)
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def halving_scatter(d: int) -> np.ndarray:
    """The scatter matrix (2^{-|i-j|})."""
    i = np.arange(d)
    return 2.0 ** (-np.abs(i[:, None] - i[None, :]))


def _cholesky(scatter):
    scatter = np.asarray(scatter, dtype=np.float64)
    if scatter.ndim != 2 or scatter.shape[0] != scatter.shape[1] or not np.allclose(scatter, scatter.T):
        raise NotSPD("scatter must be a symmetric square matrix")
    try:
        return np.linalg.cholesky(scatter)
    except np.linalg.LinAlgError:
        raise NotSPD("scatter is not positive definite") from None


def _draw(family: str, n: int, L: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, L.shape[0])) @ L.T
    if family == "normal":
        return g
    if family == "cauchy":
        return g / np.abs(rng.standard_normal((n, 1)))
    raise ValueError(f"unknown family {family!r}; expected normal or cauchy")


def sample_elliptical(family: str, n: int, d: int, scatter=None, seed: int = 0) -> PointCloud:
    """Normal ``L g`` or elliptical Cauchy ``L g / |t|`` with ``L L^T = scatter``."""
    L = _cholesky(np.eye(d) if scatter is None else scatter)
    if L.shape[0] != d:
        raise NotSPD(f"scatter must be {d}x{d}")
    return PointCloud(_draw(family, n, L, np.random.default_rng(check_seed(seed))))


def _ordering_replicate(rng, d, n, delta, L, prec, dirs):
    cloud = PointCloud(_draw("cauchy", n, L, rng))
    tukey_dirs = None if d <= 2 else dirs

    def depths(z):
        return (_tukey(cloud, z, tukey_dirs)[0],
                robust_depth(cloud, DepthQuery(z, delta, directions=dirs)).depth)

    def maha(z):
        return float(z @ prec @ z)

    def correct(depth_a, depth_b, ma, mb):
        # the point closer in Mahalanobis distance must be strictly deeper
        return depth_a != depth_b and (depth_a > depth_b) == (ma < mb)

    first_tied = None
    got_untied = got_tied = None
    draws = 0
    while got_untied is None or got_tied is None:
        draws += 1
        if draws > MAX_PAIR_DRAWS:
            raise SamplingOverflow(f"no suitable pair after {MAX_PAIR_DRAWS} draws")
        a, b = _draw("cauchy", 2, L, rng)
        (ta, ra), (tb, rb) = depths(a), depths(b)
        tied = ta == tb
        if first_tied is None:
            first_tied = tied
        ma, mb = maha(a), maha(b)
        if tied and got_tied is None:
            got_tied = correct(ra, rb, ma, mb)
        elif not tied and got_untied is None:
            got_untied = (correct(ra, rb, ma, mb), correct(ta, tb, ma, mb))
    return got_untied[0], got_untied[1], got_tied, first_tied


def ordering_experiment(d: int = 2, n: int = 50, delta: float = 0.1, replicates: int = 1999, seed: int = 0,
                        n_directions: int = 1000, threads: Optional[int] = None) -> ExperimentReport:
    """How often empirical depths order Cauchy pairs like the Mahalanobis distance.

    Each replicate draws a fresh cloud, then pairs until it has one pair with
    distinct Tukey depths (scored by robust and by Tukey depth) and one tied
    pair (scored by robust depth). The tie probability uses each replicate's
    first pair. A robust-depth tie counts as an incorrect ordering.
    """
    delta = check_delta(delta)
    if delta <= 0:
        raise ValueError("ordering_experiment needs delta > 0")
    t0 = time.perf_counter()
    L = _cholesky(halving_scatter(d))
    prec = np.linalg.inv(halving_scatter(d))
    dirs = direction_grid(d, n_directions, seed)
    rngs = spawn_rngs(seed, replicates)
    rows = _map(lambda rng: _ordering_replicate(rng, d, n, delta, L, prec, dirs), rngs, threads)
    rows = np.array(rows, dtype=bool)
    report = ExperimentReport(
        "ordering",
        {"d": d, "n": n, "delta": delta, "replicates": replicates, "seed": seed, "n_directions": n_directions},
        {
            "robust_correct_untied": proportion(int(rows[:, 0].sum()), replicates),
            "tukey_correct_untied": proportion(int(rows[:, 1].sum()), replicates),
            "robust_correct_tied": proportion(int(rows[:, 2].sum()), replicates),
            "tie_probability": proportion(int(rows[:, 3].sum()), replicates),
        },
    )
    report.wall_seconds = time.perf_counter() - t0
    return report


def subset_count_experiment(correlation: float = 0.0, n: int = 100, replicates: int = 1000, seed: int = 0,
                            z=(0.0, 0.0), threads: Optional[int] = None) -> ExperimentReport:
    """Mean number of locally optimal half-plane subsets for bivariate normal clouds.

    ``relaxed_count`` is a diagnostic using the one-sided condition of
    :func:`count_optimal_subsets`; it is not the quantity being estimated.
    """
    t0 = time.perf_counter()
    L = _cholesky([[1.0, correlation], [correlation, 1.0]])
    z = as_point(z, 2)

    def one(rng):
        cloud = PointCloud(_draw("normal", n, L, rng))
        return count_optimal_subsets(cloud, z), count_optimal_subsets(cloud, z, relaxed=True)

    counts = np.array(_map(one, spawn_rngs(seed, replicates), threads))
    report = ExperimentReport(
        "subset-count",
        {"correlation": float(correlation), "n": n, "replicates": replicates, "seed": seed,
         "z": [float(c) for c in z]},
        {
            "mean_count": mean_estimate(counts[:, 0]),
            "max_count": {"value": int(counts[:, 0].max())},
            "relaxed_count": mean_estimate(counts[:, 1]),
        },
    )
    report.wall_seconds = time.perf_counter() - t0
    return report


def consistency_experiment(n_values: Sequence[int] = (100, 1000, 5000), delta: float = 0.1, z=(0.0, 0.0),
                           seed: int = 0, n_directions: int = 1000,
                           threads: Optional[int] = None) -> ExperimentReport:
    """Empirical robust depth of standard-normal samples against the closed form."""
    delta = check_delta(delta)
    t0 = time.perf_counter()
    z = as_point(z, 2)
    exact = normal_inner_sup(float(np.linalg.norm(z)), delta)
    dirs = direction_grid(2, n_directions, seed)
    n_values = [int(k) for k in n_values]

    def one(args):
        n, rng = args
        cloud = PointCloud(rng.standard_normal((n, 2)))
        return robust_depth(cloud, DepthQuery(z, delta, directions=dirs)).depth

    values = _map(one, list(zip(n_values, spawn_rngs(seed, len(n_values)))), threads)
    estimates = {"closed_form": {"value": exact}}
    for n, v in zip(n_values, values):
        estimates[f"n={n}"] = {"value": v, "abs_error": abs(v - exact)}
    report = ExperimentReport(
        "consistency",
        {"n_values": n_values, "delta": delta, "z": [float(c) for c in z], "seed": seed,
         "n_directions": n_directions},
        estimates,
    )
    report.wall_seconds = time.perf_counter() - t0
    return report


def breakdown_demo(cloud, delta: float, m: int, t: float, u=None, seed: int = 0,
                   n_directions: int = 1000) -> ExperimentReport:
    """Add ``m`` copies of ``t * u`` and see what happens to the depths.

    Reports the depth at the contaminating atom with its lower bound
    m/(n+m), and the depth at the original deepest point (radius scaled by
    (n+m)/n) with the bound n/(n+m) times the original maximal depth.
    """
    cloud = as_cloud(cloud)
    delta = check_delta(delta)
    if m < 1 or not t > 0:
        raise ValueError("breakdown_demo needs m >= 1 and t > 0")
    t0 = time.perf_counter()
    n, d = cloud.n, cloud.d
    if u is None:
        g = np.random.default_rng(check_seed(seed)).standard_normal(d)
        u = g / np.linalg.norm(g)
    u = as_point(u, d)
    u = u / np.linalg.norm(u)
    atom = t * u
    dirty = cloud.extended(np.repeat(atom[None, :], m, axis=0))
    dirs = direction_grid(d, n_directions, seed)
    scaled = delta * (n + m) / n
    alpha_bar, center = max_depth(cloud, scaled, n_directions=n_directions, seed=seed)
    at_atom = robust_depth(dirty, DepthQuery(atom, delta, directions=dirs)).depth
    at_center = robust_depth(dirty, DepthQuery(center, delta, directions=dirs)).depth
    report = ExperimentReport(
        "breakdown",
        {"n": n, "d": d, "delta": delta, "m": int(m), "t": float(t), "u": [float(c) for c in u], "seed": seed},
        {
            "depth_at_atom": {"value": at_atom, "lower_bound": m / (n + m)},
            "depth_at_center": {"value": at_center, "lower_bound": n / (n + m) * alpha_bar},
            "center": {"value": [float(c) for c in center]},
        },
    )
    report.wall_seconds = time.perf_counter() - t0
    return report
