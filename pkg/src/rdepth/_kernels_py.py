"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable, and as the
reference the extension is tested against.
"""
import numpy as np

_CHUNK = 256


def _projections(points, z, dirs):
    # y[j, i] = <u_j, z - x_i>
    return dirs @ (z[None, :] - points).T


def _sup_rows(Y, delta):
    n = Y.shape[1]
    pos = Y > 0.0
    m = pos.sum(axis=1)
    out = (n - m) / n
    if delta == 0.0:
        return out
    ys = np.sort(np.where(pos, Y, np.inf), axis=1)
    fin = np.isfinite(ys)
    cs = np.cumsum(np.where(fin, ys, 0.0), axis=1)
    target = delta * n
    full = cs[:, -1] <= target
    out = np.where(full, 1.0, out)
    rows = np.flatnonzero(~full)
    if rows.size:
        ys, cs = ys[rows], cs[rows]
        k0 = (cs < target).sum(axis=1)
        lam = ys[np.arange(rows.size), k0]
        below = ys < lam[:, None]
        gain = np.where(below, 1.0 - ys / lam[:, None], 0.0).sum(axis=1)
        out[rows] = out[rows] + gain / n + delta / lam
    return np.minimum(out, 1.0)


def _inf_rows(Y, delta):
    n = Y.shape[1]
    nonpos = Y <= 0.0
    if delta == 0.0:
        return (Y < 0.0).sum(axis=1) / n
    p = nonpos.sum(axis=1) / n
    ws = np.sort(np.where(nonpos, -Y, np.inf), axis=1)
    fin = np.isfinite(ws)
    cs = np.cumsum(np.where(fin, ws, 0.0), axis=1)
    target = delta * n
    empty = cs[:, -1] <= target
    out = np.zeros(Y.shape[0])
    rows = np.flatnonzero(~empty)
    if rows.size:
        ws, cs = ws[rows], cs[rows]
        k0 = (cs < target).sum(axis=1)
        lam = ws[np.arange(rows.size), k0]
        below = ws < lam[:, None]
        loss = np.where(below, 1.0 - ws / lam[:, None], 0.0).sum(axis=1)
        out[rows] = p[rows] - loss / n - delta / lam
    return np.maximum(out, 0.0)


def _chunked(fn, points, z, dirs, *args):
    out = np.empty(dirs.shape[0])
    for start in range(0, dirs.shape[0], _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = fn(_projections(points, z, dirs[sl]), *args)
    return out


def sup_values(points, z, dirs, delta):
    """Worst-case closed-halfspace mass for every direction (rows of ``dirs``)."""
    return _chunked(_sup_rows, points, z, dirs, float(delta))


def inf_values(points, z, dirs, delta):
    """Best-case open-halfspace mass for every direction."""
    return _chunked(_inf_rows, points, z, dirs, float(delta))


def closed_counts(points, z, dirs):
    """Number of points with <u, z - x_i> <= 0 for every direction."""
    out = np.empty(dirs.shape[0], dtype=np.int64)
    for start in range(0, dirs.shape[0], _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = (_projections(points, z, dirs[sl]) <= 0.0).sum(axis=1)
    return out


def halfplane_windows(theta, vs):
    """Vector sums over every distinct open half-plane through the origin.

    ``theta`` holds the angles of ``vs`` in [0, 2pi), sorted ascending.
    The half-plane {angle in (a, a + pi)} only changes its content when
    ``a`` crosses some theta_i or theta_i - pi, so one window per gap
    between consecutive critical values covers all of them.

    Returns ``(start, count, sums)``: window ``w`` is the cyclic run of
    ``count[w]`` sorted indices beginning at ``start[w]``.
    """
    n = theta.size
    crit = np.unique(np.concatenate([theta, np.mod(theta - np.pi, 2 * np.pi)]))
    nxt = np.append(crit[1:], crit[0] + 2 * np.pi)
    mids = 0.5 * (crit + nxt)
    ang2 = np.concatenate([theta, theta + 2 * np.pi, theta + 4 * np.pi])
    cs = np.vstack([np.zeros((1, 2)), np.cumsum(np.vstack([vs, vs, vs]), axis=0)])
    lo = np.searchsorted(ang2, mids, side="right")
    hi = np.searchsorted(ang2, mids + np.pi, side="left")
    sums = cs[hi] - cs[lo]
    count = hi - lo
    start = np.mod(lo, n)
    return start, count, sums


def max_window_norm(theta, vs):
    if theta.size == 0:
        return 0.0
    _, _, sums = halfplane_windows(theta, vs)
    return float(np.sqrt((sums**2).sum(axis=1)).max())
