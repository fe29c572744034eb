# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Same contracts as ``_kernels_py``.

The inner solve avoids a full sort: the truncation point lambda (the
smallest positive projection whose truncated sum reaches delta*n) is found
by a weighted quickselect, after which the value is a single pass.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fmod, M_PI, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef double _weighted_select(double* a, Py_ssize_t m, double target) noexcept nogil:
    # smallest value t in a[0:m] with sum(a_i for a_i <= t) >= target;
    # caller guarantees sum(a) > target. Reorders a in place.
    cdef Py_ssize_t lo = 0, hi = m, lt, gt, i
    cdef double acc = 0.0, pivot, x, s_lt, s_eq, tmp
    cdef double p0, p1, p2
    while True:
        p0 = a[lo]
        p1 = a[lo + (hi - lo) // 2]
        p2 = a[hi - 1]
        # median of three
        if p0 > p1:
            tmp = p0; p0 = p1; p1 = tmp
        if p1 > p2:
            p1 = p2
            if p0 > p1:
                p1 = p0
        pivot = p1
        # three-way partition of a[lo:hi] into < pivot | == pivot | > pivot
        lt = lo
        gt = hi
        i = lo
        s_lt = 0.0
        s_eq = 0.0
        while i < gt:
            x = a[i]
            if x < pivot:
                a[i] = a[lt]
                a[lt] = x
                s_lt += x
                lt += 1
                i += 1
            elif x > pivot:
                gt -= 1
                a[i] = a[gt]
                a[gt] = x
            else:
                s_eq += x
                i += 1
        if acc + s_lt >= target:
            hi = lt
        elif acc + s_lt + s_eq >= target:
            return pivot
        else:
            acc += s_lt + s_eq
            lo = gt
            if lo >= hi:
                # rounding left nothing above; the largest value closes the gap
                return pivot


cdef double _sup_one(double* y, Py_ssize_t n, double delta, double* buf,
                     double* lam_io) noexcept nogil:
    # lam_io: in = filter threshold hint (inf disables), out = truncation point
    cdef Py_ssize_t i, m = 0, c = 0
    cdef double total = 0.0, sub = 0.0, target, lam, gain = 0.0, v, tau = lam_io[0]
    cdef double x
    for i in range(n):
        x = y[i]
        if x > 0.0:
            total += x
            m += 1
            if x <= tau:
                buf[c] = x
                sub += x
                c += 1
    v = <double>(n - m) / n
    if delta == 0.0:
        return v
    target = delta * n
    if total <= target:
        lam_io[0] = INFINITY
        return 1.0
    if sub < target or sub == total:
        # the hint was too small (or filtered nothing out): use all positives
        c = 0
        for i in range(n):
            buf[c] = y[i]
            c += y[i] > 0.0
    lam = _weighted_select(buf, c, target)
    lam_io[0] = lam
    for i in range(c):
        if buf[i] < lam:
            gain += 1.0 - buf[i] / lam
    v = v + gain / n + delta / lam
    return 1.0 if v > 1.0 else v


cdef double _inf_one(double* y, Py_ssize_t n, double delta, double* buf,
                     double* lam_io) noexcept nogil:
    cdef Py_ssize_t i, m = 0, neg = 0, c = 0
    cdef double total = 0.0, sub = 0.0, target, lam, loss = 0.0, v, tau = lam_io[0]
    cdef double x
    for i in range(n):
        x = -y[i]
        if x >= 0.0:
            total += x
            m += 1
            if x > 0.0:
                neg += 1
            if x <= tau:
                buf[c] = x
                sub += x
                c += 1
    if delta == 0.0:
        return <double>neg / n
    target = delta * n
    if total <= target:
        lam_io[0] = INFINITY
        return 0.0
    if sub < target or sub == total:
        c = 0
        for i in range(n):
            buf[c] = -y[i]
            c += y[i] <= 0.0
    lam = _weighted_select(buf, c, target)
    lam_io[0] = lam
    for i in range(c):
        if buf[i] < lam:
            loss += 1.0 - buf[i] / lam
    v = <double>m / n - loss / n - delta / lam
    return 0.0 if v < 0.0 else v


cdef void _project(const double[:, ::1] diff, const double[:, ::1] dirs,
                   Py_ssize_t j, double* y) noexcept nogil:
    cdef Py_ssize_t i, k, n = diff.shape[0], d = diff.shape[1]
    cdef const double* p = &diff[0, 0]
    cdef const double* u = &dirs[j, 0]
    cdef double s, u0, u1
    if d == 2:
        u0 = u[0]
        u1 = u[1]
        for i in range(n):
            y[i] = u0 * p[2 * i] + u1 * p[2 * i + 1]
        return
    for i in range(n):
        s = 0.0
        for k in range(d):
            s += u[k] * p[i * d + k]
        y[i] = s


def _prepare(points, z, dirs):
    diff = np.ascontiguousarray(np.asarray(z, dtype=np.float64)[None, :] - points)
    return diff, np.ascontiguousarray(dirs, dtype=np.float64)


def sup_values(points, z, dirs, double delta):
    if delta == 0.0:
        # nothing to transport: the closed-halfspace mass
        return closed_counts(points, z, dirs) / float(np.shape(points)[0])
    diff, dirs = _prepare(points, z, dirs)
    cdef const double[:, ::1] dv = diff
    cdef const double[:, ::1] uv = dirs
    cdef Py_ssize_t n = dv.shape[0], D = uv.shape[0], j
    out = np.empty(D)
    cdef double[::1] ov = out
    cdef double* y = <double*> malloc(n * sizeof(double))
    cdef double* buf = <double*> malloc(n * sizeof(double))
    if y == NULL or buf == NULL:
        free(y); free(buf)
        raise MemoryError()
    cdef double hint = INFINITY
    with nogil:
        for j in range(D):
            _project(dv, uv, j, y)
            # neighbouring directions have similar truncation points
            hint = 1.5 * hint if hint < INFINITY else INFINITY
            ov[j] = _sup_one(y, n, delta, buf, &hint)
    free(y); free(buf)
    return out


def inf_values(points, z, dirs, double delta):
    diff, dirs = _prepare(points, z, dirs)
    cdef const double[:, ::1] dv = diff
    cdef const double[:, ::1] uv = dirs
    cdef Py_ssize_t n = dv.shape[0], D = uv.shape[0], j
    out = np.empty(D)
    cdef double[::1] ov = out
    cdef double* y = <double*> malloc(n * sizeof(double))
    cdef double* buf = <double*> malloc(n * sizeof(double))
    if y == NULL or buf == NULL:
        free(y); free(buf)
        raise MemoryError()
    cdef double hint = INFINITY
    with nogil:
        for j in range(D):
            _project(dv, uv, j, y)
            # neighbouring directions have similar truncation points
            hint = 1.5 * hint if hint < INFINITY else INFINITY
            ov[j] = _inf_one(y, n, delta, buf, &hint)
    free(y); free(buf)
    return out


def closed_counts(points, z, dirs):
    diff, dirs = _prepare(points, z, dirs)
    cdef const double[:, ::1] dv = diff
    cdef const double[:, ::1] uv = dirs
    cdef Py_ssize_t n = dv.shape[0], D = uv.shape[0], j, i, c
    out = np.empty(D, dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    cdef double* y = <double*> malloc(n * sizeof(double))
    if y == NULL:
        raise MemoryError()
    with nogil:
        for j in range(D):
            _project(dv, uv, j, y)
            c = 0
            for i in range(n):
                if y[i] <= 0.0:
                    c += 1
            ov[j] = c
    free(y)
    return out


def halfplane_windows(theta, vs):
    """Rotating sweep: one add/remove event per critical angle.

    Events are theta_i (point i leaves the open half-plane at its lower
    edge) and theta_i - pi (point i enters at the upper edge). Events
    sharing one critical angle are applied together before recording.
    """
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef const double[:, ::1] v = np.ascontiguousarray(vs, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0], e, w, i, nev = 2 * n
    ev_angle = np.concatenate([np.asarray(theta, dtype=np.float64),
                               np.mod(np.asarray(theta, dtype=np.float64) - np.pi, 2 * np.pi)])
    ev_kind = np.concatenate([np.zeros(n, dtype=np.int64), np.ones(n, dtype=np.int64)])
    ev_idx = np.concatenate([np.arange(n, dtype=np.int64), np.arange(n, dtype=np.int64)])
    order = np.lexsort((ev_kind, ev_angle))
    cdef const double[::1] ea = np.ascontiguousarray(ev_angle[order])
    cdef const cnp.int64_t[::1] ek = np.ascontiguousarray(ev_kind[order])
    cdef const cnp.int64_t[::1] ei = np.ascontiguousarray(ev_idx[order])
    start_arr = np.empty(nev, dtype=np.int64)
    count_arr = np.empty(nev, dtype=np.int64)
    sums_arr = np.empty((nev, 2))
    cdef cnp.int64_t[::1] st = start_arr
    cdef cnp.int64_t[::1] ct = count_arr
    cdef double[:, ::1] sm = sums_arr
    cdef double a0, a1, sx = 0.0, sy = 0.0, t
    # initial window: open half-plane (a, a + pi) with a just past the last event
    a0 = ea[nev - 1]
    a1 = ea[0] + 2 * M_PI
    a0 = 0.5 * (a0 + a1)
    cdef Py_ssize_t cnt = 0
    for i in range(n):
        t = fmod(th[i] - a0 + 4 * M_PI, 2 * M_PI)
        if t > 0.0 and t < M_PI:
            sx += v[i, 0]
            sy += v[i, 1]
            cnt += 1
    # window is a cyclic run of sorted indices; find where it begins
    first = 0
    if 0 < cnt < n:
        inside = np.zeros(n, dtype=bool)
        for i in range(n):
            t = fmod(th[i] - a0 + 4 * M_PI, 2 * M_PI)
            inside[i] = t > 0.0 and t < M_PI
        for i in range(n):
            if inside[i] and not inside[(i - 1) % n]:
                first = i
                break
    cdef Py_ssize_t head = first
    w = 0
    e = 0
    while e < nev:
        a1 = ea[e]
        while e < nev and ea[e] == a1:
            i = ei[e]
            if ek[e] == 0:
                sx -= v[i, 0]
                sy -= v[i, 1]
                cnt -= 1
                head = (i + 1) % n
            else:
                sx += v[i, 0]
                sy += v[i, 1]
                cnt += 1
                if cnt == 1:
                    head = i
            e += 1
        st[w] = head
        ct[w] = cnt
        sm[w, 0] = sx
        sm[w, 1] = sy
        w += 1
    return start_arr[:w], count_arr[:w], sums_arr[:w]


def max_window_norm(theta, vs):
    if np.asarray(theta).size == 0:
        return 0.0
    _, _, sums = halfplane_windows(theta, vs)
    return float(np.sqrt((sums ** 2).sum(axis=1)).max())
