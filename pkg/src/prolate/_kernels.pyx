# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels.

Same functions, signatures and results (to rounding) as
``prolate._pykernels``; see that module for the algorithms.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, fabs, hypot, ceil

from prolate._pykernels import ConvergenceError

cnp.import_array()

EPS = 2.0 ** -52
cdef double _EPS = 2.0 ** -52
cdef double _SPLITTER = 134217729.0
cdef double _BIG = 1e250


# -- error-free transformations ---------------------------------------------

cdef inline void _two_sum(double a, double b, double* s, double* err) noexcept nogil:
    cdef double ss = a + b
    cdef double bb = ss - a
    s[0] = ss
    err[0] = (a - (ss - bb)) + (b - bb)


cdef inline void _two_prod(double a, double b, double* p, double* err) noexcept nogil:
    cdef double pp = a * b
    cdef double t = _SPLITTER * a
    cdef double ah = t - (t - a)
    cdef double al = a - ah
    t = _SPLITTER * b
    cdef double bh = t - (t - b)
    cdef double bl = b - bh
    p[0] = pp
    err[0] = al * bl - (((pp - ah * bh) - al * bh) - ah * bl)


def two_sum(double a, double b):
    cdef double s, e
    _two_sum(a, b, &s, &e)
    return s, e


def two_prod(double a, double b):
    cdef double p, e
    _two_prod(a, b, &p, &e)
    return p, e


def dd_dot(a, b):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=float)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=float)
    cdef Py_ssize_t n = av.shape[0], i
    if bv.shape[0] != n:
        raise ValueError("operands differ in length: %d vs %d" % (n, bv.shape[0]))
    cdef double hi = 0.0, lo = 0.0, p, s, q
    with nogil:
        for i in range(n):
            _two_prod(av[i], bv[i], &p, &s)
            _two_sum(hi, p, &hi, &q)
            lo += q + s
        _two_sum(hi, lo, &hi, &lo)
    return hi, lo


def dot2(a, b):
    hi, lo = dd_dot(a, b)
    return hi + lo


def dot2_matmul(A, B):
    cdef const double[:, ::1] Av = np.ascontiguousarray(A, dtype=float)
    cdef const double[:, ::1] Bv = np.ascontiguousarray(B, dtype=float)
    cdef Py_ssize_t n = Av.shape[0], kd = Av.shape[1], m = Bv.shape[1]
    if Bv.shape[0] != kd:
        raise ValueError("inner dimensions differ: %d vs %d" % (kd, Bv.shape[0]))
    out = np.empty((n, m))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef double hi, lo, p, s, q, a
    with nogil:
        for i in range(n):
            for j in range(m):
                hi = 0.0
                lo = 0.0
                for k in range(kd):
                    a = Av[i, k]
                    if a == 0.0:
                        continue
                    _two_prod(a, Bv[k, j], &p, &s)
                    _two_sum(hi, p, &hi, &q)
                    lo += q + s
                ov[i, j] = hi + lo
    return out


# -- Legendre -----------------------------------------------------------------

def legendre_table(int kmax, x):
    xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    cdef const double[::1] xv = np.ascontiguousarray(xa)
    cdef Py_ssize_t nx = xv.shape[0], i
    out = np.empty((kmax + 1, nx))
    cdef double[:, ::1] ov = out
    cdef int k
    cdef double a, b, r0 = sqrt(0.5), r1 = sqrt(1.5)
    with nogil:
        for i in range(nx):
            ov[0, i] = r0
            if kmax >= 1:
                ov[1, i] = r1 * xv[i]
        for k in range(1, kmax):
            a = sqrt(<double>((2 * k + 1) * (2 * k + 3))) / (k + 1)
            b = k * sqrt((2.0 * k + 3) / (2.0 * k - 1)) / (k + 1)
            for i in range(nx):
                ov[k + 1, i] = a * xv[i] * ov[k, i] - b * ov[k - 1, i]
    return out


# -- spherical Bessel ---------------------------------------------------------

cdef void _bessel_up(int mmax, double x, double* out) noexcept nogil:
    cdef double s = sin(x), c = cos(x)
    cdef double j0 = s / x, j1, j2
    cdef int m
    out[0] = j0
    if mmax == 0:
        return
    j1 = s / (x * x) - c / x
    out[1] = j1
    for m in range(1, mmax):
        j2 = (2 * m + 1) / x * j1 - j0
        out[m + 1] = j2
        j0 = j1
        j1 = j2


cdef void _bessel_down(int mmax, double x, double* out, double* work) noexcept nogil:
    # work must hold start + 2 doubles
    cdef int start = mmax + 16 + <int>ceil(x)
    cdef int m, i
    cdef double f, norm, s, c, j0, j1
    for i in range(start + 2):
        work[i] = 0.0
    work[start] = 1e-300
    for m in range(start, 0, -1):
        f = (2 * m + 1) / x * work[m] - work[m + 1]
        work[m - 1] = f
        if fabs(f) > _BIG:
            for i in range(m - 1, start + 2):
                work[i] *= 1.0 / _BIG
    s = sin(x)
    c = cos(x)
    j0 = s / x
    j1 = s / (x * x) - c / x
    if fabs(j0) >= fabs(j1):
        norm = j0 / work[0]
    else:
        norm = j1 / work[1]
    for i in range(mmax + 1):
        out[i] = work[i] * norm


cdef void _bessel_seq(int mmax, double x, double* out, double* work) noexcept nogil:
    cdef int m_up
    if mmax < x:
        _bessel_up(mmax, x, out)
        return
    _bessel_down(mmax, x, out, work)
    m_up = <int>ceil(x) - 1
    if m_up >= 1:
        _bessel_up(m_up, x, out)


cdef Py_ssize_t _work_size(int mmax, double x):
    # the downward branch only runs when mmax >= x
    cdef double xx = x if x <= mmax else mmax
    return mmax + 16 + <Py_ssize_t>ceil(xx) + 2


def sph_bessel_up(int mmax, double x):
    out = np.zeros(mmax + 1)
    cdef double[::1] ov = out
    _bessel_up(mmax, x, &ov[0])
    return out


def sph_bessel_down(int mmax, double x):
    out = np.zeros(mmax + 1)
    work = np.zeros(mmax + 16 + int(np.ceil(x)) + 2)
    cdef double[::1] ov = out
    cdef double[::1] wv = work
    _bessel_down(mmax, x, &ov[0], &wv[0])
    return out


def sph_bessel_seq(int mmax, double x):
    if not x > 0.0:
        raise ValueError("spherical Bessel requires x > 0, got %r" % (x,))
    out = np.zeros(mmax + 1)
    work = np.zeros(_work_size(mmax, x))
    cdef double[::1] ov = out
    cdef double[::1] wv = work
    _bessel_seq(mmax, x, &ov[0], &wv[0])
    return out


def sph_bessel_table(int mmax, x):
    xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if xa.size and not np.all(xa > 0.0):
        raise ValueError("spherical Bessel requires x > 0")
    cdef const double[::1] xv = np.ascontiguousarray(xa)
    cdef Py_ssize_t nx = xv.shape[0], i
    out = np.zeros((nx, mmax + 1))
    cdef double[:, ::1] ov = out
    cdef double xmax = float(xa.max()) if nx else 0.0
    work = np.zeros(_work_size(mmax, xmax))
    cdef double[::1] wv = work
    with nogil:
        for i in range(nx):
            _bessel_seq(mmax, xv[i], &ov[i, 0], &wv[0])
    return out


# -- Gauss-Legendre -----------------------------------------------------------

def gauss_legendre_newton(int m):
    cdef int half = m // 2
    nodes = np.empty(m)
    weights = np.empty(m)
    cdef double[::1] nv = nodes
    cdef double[::1] wv = weights
    xs = np.empty(half)
    cdef double[::1] x = xs
    cdef int i, k, it
    cdef double theta, p0, p1, p2, dp, dx, big
    cdef double pi = np.pi
    with nogil:
        for i in range(half):
            theta = pi * (4.0 * (i + 1) - 1.0) / (4.0 * m + 2.0)
            x[i] = (1.0 - 1.0 / (8.0 * m * m) + 1.0 / (8.0 * (<double>m) ** 3)) * cos(theta)
        for it in range(20):
            big = 0.0
            for i in range(half):
                p0 = 1.0
                p1 = x[i]
                for k in range(1, m):
                    p2 = ((2 * k + 1) * x[i] * p1 - k * p0) / (k + 1)
                    p0 = p1
                    p1 = p2
                dp = m * (x[i] * p1 - p0) / (x[i] * x[i] - 1.0)
                dx = p1 / dp
                x[i] = x[i] - dx
                if fabs(dx) > big:
                    big = fabs(dx)
            if half == 0 or big <= 1e-15:
                break
        for i in range(half):
            p0 = 1.0
            p1 = x[i]
            for k in range(1, m):
                p2 = ((2 * k + 1) * x[i] * p1 - k * p0) / (k + 1)
                p0 = p1
                p1 = p2
            dp = m * (x[i] * p1 - p0) / (x[i] * x[i] - 1.0)
            nv[i] = -x[i]
            nv[m - 1 - i] = x[i]
            wv[i] = 2.0 / ((1.0 - x[i] * x[i]) * dp * dp)
            wv[m - 1 - i] = wv[i]
        if m % 2:
            nv[half] = 0.0
            p0 = 1.0
            p1 = 0.0
            for k in range(1, m):
                p2 = (-k * p0) / (k + 1)
                p0 = p1
                p1 = p2
            dp = m * p0
            wv[half] = 2.0 / (dp * dp)
    return nodes, weights


# -- tridiagonal eigensolvers -------------------------------------------------

def tql2(diagonal, offdiagonal, vectors=True):
    dd = np.array(diagonal, dtype=float)
    cdef Py_ssize_t n = dd.shape[0]
    ee = np.zeros(n)
    ee[: n - 1] = offdiagonal
    cdef double[::1] d = dd
    cdef double[::1] e = ee
    cdef bint want = bool(vectors)
    Zarr = np.eye(n) if want else np.zeros((1, 1))
    cdef double[:, ::1] Z = Zarr
    cdef double f = 0.0, tst1 = 0.0, g, p, r, dl1, h, c, c2, c3, el1, s, s2, zi
    cdef Py_ssize_t l, m, i, col
    cdef long total = 0, cap = 50 * n
    cdef Py_ssize_t failed = -1
    with nogil:
        for l in range(n):
            tst1 = max(tst1, fabs(d[l]) + fabs(e[l]))
            m = l
            while m < n - 1 and fabs(e[m]) > _EPS * tst1:
                m += 1
            if m > l:
                while True:
                    total += 1
                    if total > cap:
                        failed = l
                        break
                    g = d[l]
                    p = (d[l + 1] - g) / (2.0 * e[l])
                    r = hypot(p, 1.0)
                    if p < 0:
                        r = -r
                    d[l] = e[l] / (p + r)
                    d[l + 1] = e[l] * (p + r)
                    dl1 = d[l + 1]
                    h = g - d[l]
                    for i in range(l + 2, n):
                        d[i] -= h
                    f += h
                    p = d[m]
                    c = 1.0
                    c2 = c
                    c3 = c
                    el1 = e[l + 1]
                    s = 0.0
                    s2 = 0.0
                    i = m - 1
                    while i >= l:
                        c3 = c2
                        c2 = c
                        s2 = s
                        g = c * e[i]
                        h = c * p
                        r = hypot(p, e[i])
                        e[i + 1] = s * r
                        s = e[i] / r
                        c = p / r
                        p = c * d[i] - s * g
                        d[i + 1] = h + s * (c * g + s * d[i])
                        if want:
                            for col in range(n):
                                zi = Z[i, col]
                                Z[i, col] = c * zi - s * Z[i + 1, col]
                                Z[i + 1, col] = s * zi + c * Z[i + 1, col]
                        i -= 1
                    p = -s * s2 * c3 * el1 * e[l] / dl1
                    e[l] = s * p
                    d[l] = c * p
                    if fabs(e[l]) <= _EPS * tst1:
                        break
                if failed >= 0:
                    break
            d[l] = d[l] + f
            e[l] = 0.0
    if failed >= 0:
        raise ConvergenceError(failed, total)
    order = np.argsort(dd, kind="stable")
    w = dd[order]
    if not want:
        return w, None
    return w, np.ascontiguousarray(Zarr[order].T)


cdef long _sturm(const double* d, const double* e, Py_ssize_t n, double x) noexcept nogil:
    cdef long count = 0
    cdef double q = 1.0
    cdef Py_ssize_t i
    for i in range(n):
        if i > 0:
            q = d[i] - x - e[i - 1] * e[i - 1] / q
        else:
            q = d[i] - x
        if q == 0.0:
            q = -_EPS * (fabs(d[i]) + fabs(x) + 1.0)
        if q < 0.0:
            count += 1
    return count


def sturm_count(diagonal, offdiagonal, double x):
    cdef const double[::1] d = np.ascontiguousarray(diagonal, dtype=float)
    cdef const double[::1] e = np.ascontiguousarray(np.append(np.asarray(offdiagonal, dtype=float), 0.0))
    return int(_sturm(&d[0], &e[0], d.shape[0], x))


def bisect_eigenvalues(diagonal, offdiagonal, int count):
    dd = np.ascontiguousarray(diagonal, dtype=float)
    ea = np.asarray(offdiagonal, dtype=float)
    cdef Py_ssize_t n = dd.shape[0]
    ae = np.abs(ea)
    radius = np.zeros(n)
    radius[:-1] += ae
    radius[1:] += ae
    cdef double lo0 = float(np.min(dd - radius))
    cdef double hi0 = float(np.max(dd + radius))
    cdef const double[::1] d = dd
    cdef const double[::1] e = np.ascontiguousarray(np.append(ea, 0.0))
    out = np.empty(count)
    cdef double[::1] ov = out
    cdef int idx
    cdef double lo, hi, mid
    with nogil:
        for idx in range(count):
            lo = lo0
            hi = hi0
            if idx > 0:
                lo = ov[idx - 1]
            while hi - lo > 2.0 * _EPS * max(fabs(lo), fabs(hi)) + 1e-300:
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                if _sturm(&d[0], &e[0], n, mid) > idx:
                    hi = mid
                else:
                    lo = mid
            ov[idx] = 0.5 * (lo + hi)
    return out


def inverse_iteration(diagonal, offdiagonal, double shift, int iterations=3):
    dd = np.asarray(diagonal, dtype=float)
    ea = np.asarray(offdiagonal, dtype=float)
    cdef Py_ssize_t n = dd.shape[0]
    cdef double scale
    if n > 1:
        scale = float(np.max(np.abs(dd))) + float(np.max(np.abs(ea)))
    else:
        scale = abs(dd[0]) + 1.0
    cdef double pert = _EPS * scale
    cdef const double[::1] a = np.ascontiguousarray(dd - shift)
    cdef const double[::1] b = np.ascontiguousarray(np.append(ea, 0.0))
    u0a = np.zeros(n)
    u1a = np.zeros(n)
    u2a = np.zeros(n)
    multa = np.zeros(n)
    swapa = np.zeros(n, dtype=np.intc)
    cdef double[::1] u0 = u0a
    cdef double[::1] u1 = u1a
    cdef double[::1] u2 = u2a
    cdef double[::1] mult = multa
    cdef int[::1] swap = swapa
    va = np.ones(n) / np.sqrt(n)
    ya = np.zeros(n)
    xa = np.zeros(n)
    cdef double[::1] v = va
    cdef double[::1] y = ya
    cdef double[::1] x = xa
    cdef double diag, sup, sub, nxt_d, nxt_s, mlt, s, t
    cdef Py_ssize_t i
    cdef int it
    with nogil:
        diag = a[0]
        sup = b[0] if n > 1 else 0.0
        for i in range(n - 1):
            sub = b[i]
            nxt_d = a[i + 1]
            nxt_s = b[i + 1]
            if fabs(diag) >= fabs(sub):
                if diag == 0.0:
                    diag = pert
                mlt = sub / diag
                u0[i] = diag
                u1[i] = sup
                u2[i] = 0.0
                diag = nxt_d - mlt * sup
                sup = nxt_s
                swap[i] = 0
            else:
                mlt = diag / sub
                u0[i] = sub
                u1[i] = nxt_d
                u2[i] = nxt_s
                diag = sup - mlt * nxt_d
                sup = -mlt * nxt_s
                swap[i] = 1
            mult[i] = mlt
        if diag == 0.0:
            diag = pert
        u0[n - 1] = diag
        for it in range(iterations):
            for i in range(n):
                y[i] = v[i]
            for i in range(n - 1):
                if swap[i]:
                    t = y[i]
                    y[i] = y[i + 1]
                    y[i + 1] = t
                y[i + 1] -= mult[i] * y[i]
            i = n - 1
            while i >= 0:
                s = y[i]
                if i + 1 < n:
                    s -= u1[i] * x[i + 1]
                if i + 2 < n:
                    s -= u2[i] * x[i + 2]
                x[i] = s / u0[i]
                i -= 1
            s = 0.0
            for i in range(n):
                s += x[i] * x[i]
            s = sqrt(s)
            for i in range(n):
                v[i] = x[i] / s
    return va


# -- eigenvector head refinement ----------------------------------------------

def refine_head(diagonal, offdiagonal, double eigenvalue, vector, double threshold=1e-3):
    va = np.array(vector, dtype=float)
    cdef double[::1] v = va
    cdef Py_ssize_t n = v.shape[0]
    if n < 2:
        return va
    cdef const double[::1] d = np.ascontiguousarray(diagonal, dtype=float)
    cdef const double[::1] e = np.ascontiguousarray(offdiagonal, dtype=float)
    cdef double vmax = float(np.max(np.abs(va)))
    rhoa = np.zeros(n)
    cdef double[::1] rho = rhoa
    cdef double prev = 0.0, den
    cdef Py_ssize_t j, anchor = 0
    with nogil:
        for j in range(n - 1):
            den = eigenvalue - d[j]
            if j > 0:
                den -= e[j - 1] * prev
            if den <= 0.0:
                anchor = j
                break
            prev = e[j] / den
            rho[j] = prev
            if fabs(v[j + 1]) >= threshold * vmax:
                anchor = j + 1
                break
        j = anchor - 1
        while j >= 0:
            v[j] = rho[j] * v[j + 1]
            j -= 1
    return va
