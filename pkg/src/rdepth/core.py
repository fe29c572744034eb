"""Shared types, validation and seeded randomness."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

UNIT_TOL = 1e-12
MAX_SEED = 2**64 - 1


class RDepthError(ValueError):
    """Base class for all errors raised by this package."""


class EmptyInput(RDepthError):
    pass


class DimensionMismatch(RDepthError):
    pass


class NonFiniteCoordinate(RDepthError):
    pass


class InvalidDimension(RDepthError):
    pass


class MalformedInput(RDepthError):
    pass


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Immutable ``n x d`` array of observations.

    The underlying array is marked read-only; duplicate rows are allowed.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise EmptyInput("a point cloud needs at least one row")
        if pts.shape[1] == 0:
            raise InvalidDimension("points must have dimension >= 1")
        if not np.all(np.isfinite(pts)):
            raise NonFiniteCoordinate("point cloud contains NaN or infinite coordinates")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"PointCloud(n={self.n}, d={self.d})"

    def extended(self, extra) -> "PointCloud":
        """New cloud with ``extra`` rows appended; ``self`` is untouched."""
        extra = np.atleast_2d(np.asarray(extra, dtype=np.float64))
        if extra.shape[1] != self.d:
            raise DimensionMismatch(f"expected rows of dimension {self.d}, got {extra.shape[1]}")
        return PointCloud(np.vstack([self.points, extra]))


@dataclass(frozen=True, eq=False)
class Direction:
    """Unit vector. Renormalized on construction."""

    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64, copy=True).reshape(-1)
        norm = np.linalg.norm(u)
        if u.size == 0 or not np.isfinite(norm) or norm == 0.0:
            raise InvalidDimension("a direction must be a finite nonzero vector")
        if abs(norm - 1.0) > UNIT_TOL:
            u = u / norm
        u.flags.writeable = False
        object.__setattr__(self, "u", u)

    @property
    def d(self) -> int:
        return self.u.size

    def __repr__(self):
        return f"Direction({np.array2string(self.u, precision=6)})"


def validate_cloud(rows: Sequence[Sequence[float]]) -> PointCloud:
    """Check raw rows and wrap them in a :class:`PointCloud`."""
    if isinstance(rows, PointCloud):
        return rows
    if isinstance(rows, np.ndarray):
        if rows.size == 0:
            raise EmptyInput("no rows given")
        return PointCloud(rows)
    rows = list(rows)
    if not rows:
        raise EmptyInput("no rows given")
    dims = set()
    for i, row in enumerate(rows):
        r = np.atleast_1d(np.asarray(row, dtype=np.float64))
        dims.add(r.size)
        if len(dims) > 1:
            raise DimensionMismatch(f"row {i} has {r.size} coordinates, expected {next(iter(dims - {r.size}))}")
    return PointCloud(np.array([np.atleast_1d(np.asarray(r, dtype=np.float64)) for r in rows]))


def as_cloud(data) -> PointCloud:
    return data if isinstance(data, PointCloud) else validate_cloud(data)


def as_point(z, d: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=np.float64)).reshape(-1)
    if z.size != d:
        raise DimensionMismatch(f"point has dimension {z.size}, cloud has dimension {d}")
    if not np.all(np.isfinite(z)):
        raise NonFiniteCoordinate("point has non-finite coordinates")
    return z


def check_delta(delta: float) -> float:
    delta = float(delta)
    if not np.isfinite(delta) or delta < 0:
        raise RDepthError(f"ambiguity radius must be finite and >= 0, got {delta}")
    return delta


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise RDepthError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(check_seed(seed))


def spawn_rngs(seed, count: int) -> list[np.random.Generator]:
    """Independent per-task streams derived deterministically from ``seed``."""
    children = np.random.SeedSequence(check_seed(seed)).spawn(count)
    return [np.random.default_rng(c) for c in children]


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def parse_csv(text: str | Iterable[str]) -> PointCloud:
    """Parse one point per row. A non-numeric first row is taken as a header.

    Raises :class:`MalformedInput` naming the 1-based line of the first bad row.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    rows = []
    width = None
    for lineno, fields in enumerate(csv.reader(text, quoting=csv.QUOTE_NONE), start=1):
        fields = [f.strip() for f in fields]
        if not fields or all(f == "" for f in fields):
            continue
        if lineno == 1 and not all(_is_number(f) for f in fields):
            continue
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise MalformedInput(f"line {lineno}: non-numeric field in {','.join(fields)!r}") from None
        if not all(np.isfinite(row)):
            raise NonFiniteCoordinate(f"line {lineno}: non-finite coordinate")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DimensionMismatch(f"line {lineno}: expected {width} fields, got {len(row)}")
        rows.append(row)
    if not rows:
        raise EmptyInput("no data rows in input")
    return PointCloud(np.array(rows))


def read_csv(path) -> PointCloud:
    with open(path, newline="") as fh:
        return parse_csv(fh)


def format_number(x, precision: int | None = None) -> str:
    """Round-trip decimal text for ``x``, or ``precision`` significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if precision is None:
        return repr(x)
    return f"{x:.{int(precision)}g}"


def round_floats(obj, precision: int | None = None):
    """Recursively round floats in a JSON-like structure to ``precision`` digits."""
    if precision is None:
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.{int(precision)}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, precision) for v in obj]
    return obj
