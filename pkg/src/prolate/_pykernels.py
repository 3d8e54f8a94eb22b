"""Pure-Python/numpy implementations of the numerical kernels.

This module mirrors ``prolate._kernels`` (the compiled core) function by
function. It is used when the extension is not built or when
``PROLATE_PURE_PYTHON=1`` is set. Results agree with the compiled core to
rounding; loops that carry a recurrence stay scalar, everything that is
embarrassingly parallel is vectorized with numpy.
"""
import math

import numpy as np

EPS = 2.0 ** -52
_SPLITTER = 134217729.0  # 2**27 + 1
_BIG = 1e250
_hypot = np.hypot  # libm hypot, as used by the compiled core


class ConvergenceError(ArithmeticError):
    """Raised when the tridiagonal eigensolver exceeds its iteration cap."""

    def __init__(self, index, iterations):
        super().__init__(
            "QL iteration failed to converge for eigenvalue index %d after %d iterations"
            % (index, iterations)
        )
        self.index = index
        self.iterations = iterations


# -- error-free transformations ---------------------------------------------

def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def two_prod(a, b):
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def dd_dot(a, b):
    """Double-double dot product of two float sequences.

    Returns ``(hi, lo)`` with ``hi + lo`` the dot product carried to roughly
    twice working precision (Ogita-Rump-Oishi Dot2 without the final
    rounding).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p, s = _vec_two_prod(a, b)
    hi = 0.0
    lo = 0.0
    for pi, si in zip(p.tolist(), s.tolist()):
        hi, q = two_sum(hi, pi)
        lo += q + si
    return two_sum(hi, lo)


def dot2(a, b):
    """Compensated dot product, rounded once at the end."""
    hi, lo = dd_dot(a, b)
    return hi + lo


def _vec_two_prod(a, b):
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def dot2_matmul(A, B):
    """Compensated matrix product ``A @ B`` (Dot2 in every entry)."""
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    n, kdim = A.shape
    kdim2, m = B.shape
    if kdim != kdim2:
        raise ValueError("inner dimensions differ: %d vs %d" % (kdim, kdim2))
    hi = np.zeros((n, m))
    lo = np.zeros((n, m))
    for k in range(kdim):
        col = A[:, k]
        if not col.any():
            continue
        p, e = _vec_two_prod(col[:, None], B[k][None, :])
        s = hi + p
        bb = s - hi
        q = (hi - (s - bb)) + (p - bb)
        hi = s
        lo += q + e
    return hi + lo


# -- Legendre -----------------------------------------------------------------

def legendre_table(kmax, x):
    """Orthonormal Legendre values, shape ``(kmax + 1, len(x))``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((kmax + 1, x.size))
    out[0] = math.sqrt(0.5)
    if kmax >= 1:
        out[1] = math.sqrt(1.5) * x
    for k in range(1, kmax):
        a = math.sqrt((2 * k + 1) * (2 * k + 3)) / (k + 1)
        b = k * math.sqrt((2 * k + 3) / (2 * k - 1)) / (k + 1)
        out[k + 1] = a * x * out[k] - b * out[k - 1]
    return out


# -- spherical Bessel ---------------------------------------------------------

def sph_bessel_up(mmax, x):
    """j_0..j_mmax by upward recurrence; accurate only while m < x."""
    out = np.zeros(mmax + 1)
    s = math.sin(x)
    c = math.cos(x)
    j0 = s / x
    out[0] = j0
    if mmax == 0:
        return out
    j1 = s / (x * x) - c / x
    out[1] = j1
    for m in range(1, mmax):
        j2 = (2 * m + 1) / x * j1 - j0
        out[m + 1] = j2
        j0, j1 = j1, j2
    return out


def sph_bessel_down(mmax, x):
    """j_0..j_mmax by Miller's downward recurrence, normalized on j_0 or j_1."""
    start = mmax + 16 + int(math.ceil(x))
    vals = np.zeros(start + 2)
    vals[start] = 1e-300
    for m in range(start, 0, -1):
        f = (2 * m + 1) / x * vals[m] - vals[m + 1]
        vals[m - 1] = f
        if abs(f) > _BIG:
            vals[m - 1:] *= 1.0 / _BIG
    s = math.sin(x)
    c = math.cos(x)
    j0 = s / x
    j1 = s / (x * x) - c / x
    if abs(j0) >= abs(j1):
        norm = j0 / vals[0]
    else:
        norm = j1 / vals[1]
    return vals[: mmax + 1] * norm


def sph_bessel_seq(mmax, x):
    """Spherical Bessel j_0(x)..j_mmax(x) for x > 0 with regime switch at m >= x."""
    if not x > 0.0:
        raise ValueError("spherical Bessel requires x > 0, got %r" % (x,))
    if mmax < x:
        return sph_bessel_up(mmax, x)
    out = sph_bessel_down(mmax, x)
    m_up = int(math.ceil(x)) - 1  # orders strictly below x: stable upward branch
    if m_up >= 1:
        out[: m_up + 1] = sph_bessel_up(m_up, x)
    return out


def sph_bessel_table(mmax, x):
    """Rows of ``sph_bessel_seq(mmax, x_i)`` for every x_i, shape ``(len(x), mmax + 1)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if x.size and not np.all(x > 0.0):
        raise ValueError("spherical Bessel requires x > 0")
    out = np.zeros((x.size, mmax + 1))
    for i, xi in enumerate(x.tolist()):
        out[i] = sph_bessel_seq(mmax, xi)
    return out


# -- Gauss-Legendre -----------------------------------------------------------

def gauss_legendre_newton(m):
    """Nodes ascending and weights of the m-point Gauss-Legendre rule."""
    half = m // 2
    i = np.arange(1, half + 1, dtype=float)
    theta = math.pi * (4.0 * i - 1.0) / (4.0 * m + 2.0)
    x = (1.0 - 1.0 / (8.0 * m * m) + 1.0 / (8.0 * m ** 3)) * np.cos(theta)
    for _ in range(20):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for k in range(1, m):
            p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        dp = m * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if half == 0 or np.max(np.abs(dx)) <= 1e-15:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(1, m):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = m * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    nodes = np.empty(m)
    weights = np.empty(m)
    # x is descending (largest node first)
    nodes[:half] = -x
    nodes[m - half:] = x[::-1]
    weights[:half] = w
    weights[m - half:] = w[::-1]
    if m % 2:
        nodes[half] = 0.0
        p0, p1 = 1.0, 0.0
        for k in range(1, m):
            p0, p1 = p1, (-k * p0) / (k + 1)
        # P_m'(0) = m * P_{m-1}(0)
        dp0 = m * p0
        weights[half] = 2.0 / (dp0 * dp0)
    return nodes, weights


# -- tridiagonal eigensolvers -------------------------------------------------

def tql2(diagonal, offdiagonal, vectors=True):
    """Implicit QL with Wilkinson shift on a symmetric tridiagonal matrix.

    Returns ``(w, V)``: eigenvalues ascending and, if requested, the
    orthonormal eigenvectors as the columns of ``V``.
    """
    d = np.array(diagonal, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = offdiagonal
    Z = np.eye(n) if vectors else None
    f = 0.0
    tst1 = 0.0
    total = 0
    cap = 50 * n
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n - 1 and abs(e[m]) > EPS * tst1:
            m += 1
        if m > l:
            while True:
                total += 1
                if total > cap:
                    raise ConvergenceError(l, total)
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = _hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                d[l + 2:] -= h
                f += h
                p = d[m]
                c = 1.0
                c2 = c
                c3 = c
                el1 = e[l + 1]
                s = 0.0
                s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = _hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    if vectors:
                        zi = Z[i].copy()
                        Z[i] = c * zi - s * Z[i + 1]
                        Z[i + 1] = s * zi + c * Z[i + 1]
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= EPS * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    order = np.argsort(d, kind="stable")
    w = d[order]
    if not vectors:
        return w, None
    return w, np.ascontiguousarray(Z[order].T)


def sturm_count(diagonal, offdiagonal, x):
    """Number of eigenvalues strictly less than x."""
    count = 0
    q = 1.0
    n = len(diagonal)
    for i in range(n):
        off2 = offdiagonal[i - 1] ** 2 if i > 0 else 0.0
        q = diagonal[i] - x - (off2 / q if i > 0 else 0.0)
        if q == 0.0:
            q = -EPS * (abs(diagonal[i]) + abs(x) + 1.0)
        if q < 0.0:
            count += 1
    return count


def bisect_eigenvalues(diagonal, offdiagonal, count):
    """The ``count`` smallest eigenvalues by Sturm-sequence bisection."""
    d = np.asarray(diagonal, dtype=float)
    e = np.asarray(offdiagonal, dtype=float)
    n = d.size
    ae = np.abs(e)
    radius = np.zeros(n)
    radius[:-1] += ae
    radius[1:] += ae
    lo0 = float(np.min(d - radius))
    hi0 = float(np.max(d + radius))
    out = np.empty(count)
    dl = d.tolist()
    el = e.tolist()
    for idx in range(count):
        lo, hi = lo0, hi0
        if idx > 0:
            lo = out[idx - 1]
        while hi - lo > 2.0 * EPS * max(abs(lo), abs(hi)) + 1e-300:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if sturm_count(dl, el, mid) > idx:
                hi = mid
            else:
                lo = mid
        out[idx] = 0.5 * (lo + hi)
    return out


def inverse_iteration(diagonal, offdiagonal, shift, iterations=3):
    """Unit eigenvector for the eigenvalue nearest ``shift``.

    Tridiagonal LU with partial pivoting, repeated solves from a fixed start.
    """
    d = np.asarray(diagonal, dtype=float)
    e = np.asarray(offdiagonal, dtype=float)
    n = d.size
    scale = float(np.max(np.abs(d))) + float(np.max(np.abs(e))) if n > 1 else abs(d[0]) + 1.0
    pert = EPS * scale
    # factor T - shift*I = P L U; U has up to two superdiagonals
    a = (d - shift).tolist()
    b = np.append(e, 0.0).tolist()   # super diagonal
    c = np.append(e, 0.0).tolist()   # sub diagonal
    u0 = [0.0] * n
    u1 = [0.0] * n
    u2 = [0.0] * n
    mult = [0.0] * n
    swap = [False] * n
    diag = a[0]
    sup = b[0] if n > 1 else 0.0
    for i in range(n - 1):
        sub = c[i]
        nxt_d = a[i + 1]
        nxt_s = b[i + 1]
        if abs(diag) >= abs(sub):
            if diag == 0.0:
                diag = pert
            mlt = sub / diag
            u0[i], u1[i], u2[i] = diag, sup, 0.0
            diag = nxt_d - mlt * sup
            sup = nxt_s
            swap[i] = False
        else:
            mlt = diag / sub
            u0[i], u1[i], u2[i] = sub, nxt_d, nxt_s
            diag = sup - mlt * nxt_d
            sup = -mlt * nxt_s
            swap[i] = True
        mult[i] = mlt
    if diag == 0.0:
        diag = pert
    u0[n - 1] = diag
    v = np.ones(n) / math.sqrt(n)
    for _ in range(iterations):
        y = v.tolist()
        for i in range(n - 1):
            if swap[i]:
                y[i], y[i + 1] = y[i + 1], y[i]
            y[i + 1] -= mult[i] * y[i]
        x = [0.0] * n
        for i in range(n - 1, -1, -1):
            s = y[i]
            if i + 1 < n:
                s -= u1[i] * x[i + 1]
            if i + 2 < n:
                s -= u2[i] * x[i + 2]
            x[i] = s / u0[i]
        s = 0.0
        for xi in x:
            s += xi * xi
        s = math.sqrt(s)
        v = np.asarray(x) / s
    return v


# -- eigenvector head refinement ----------------------------------------------

def refine_head(diagonal, offdiagonal, eigenvalue, vector, threshold=1e-3):
    """Recompute the small leading entries of a tridiagonal eigenvector.

    Entries before the first one reaching ``threshold * max|v|`` are rebuilt
    from the forward continued fraction of the three-term recurrence,
    ``v_j = rho_j v_{j+1}``; this keeps them relatively (not only
    absolutely) accurate when they are many orders below the peak.
    Returns a new array; the input is not modified.
    """
    v = np.array(vector, dtype=float)
    n = v.size
    if n < 2:
        return v
    vmax = float(np.max(np.abs(v)))
    d = diagonal
    e = offdiagonal
    rho = [0.0] * n
    prev = 0.0
    anchor = 0
    for j in range(n - 1):
        den = eigenvalue - d[j]
        if j > 0:
            den -= e[j - 1] * prev
        if den <= 0.0:
            anchor = j
            break
        prev = e[j] / den
        rho[j] = prev
        if abs(v[j + 1]) >= threshold * vmax:
            anchor = j + 1
            break
    for j in range(anchor - 1, -1, -1):
        v[j] = rho[j] * v[j + 1]
    return v
