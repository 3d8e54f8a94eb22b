"""Brute-force reference computations used to validate the main library.

Nothing in the library calls this module (only the test-suite and the
``oracle-compare`` CLI command do). Its eigenvalues come from a Nystrom
discretization of an integral operator, solved with LAPACK via
``numpy.linalg.eigh``; it shares no code path with the Legendre-Galerkin
eigensystem.

Two kernels are offered:

* ``"sinc"``: the sinc kernel ``sin(c(x - y)) / (pi (x - y))`` whose
  eigenvalues are the lambda_n directly. Double precision limits it to
  absolute accuracy of about 1e-16 in lambda.
* ``"fourier"``: the finite Fourier kernel ``exp(i c x y)`` split by parity
  into ``cos`` and ``sin`` blocks on the positive nodes. Its eigenvalues
  are ``|mu_n| = sqrt(2 pi lambda_n / c)``, so an absolute error in |mu|
  is a much smaller relative error in lambda. Nodes, weights and the
  kernel are formed in long double and each eigenvalue is refined by a
  long-double Rayleigh quotient of the double-precision eigenvector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from prolate._backend import kernels
from prolate.specfun import gauss_legendre

LONG_DOUBLE_IS_EXTENDED = np.finfo(np.longdouble).eps < 1e-18


@dataclass(frozen=True)
class NystromResult:
    lam: np.ndarray            # descending
    psi_samples: np.ndarray    # (n_count, m) values at ``nodes``
    nodes: np.ndarray
    weights: np.ndarray
    kernel: str

    def __iter__(self):
        yield self.lam
        yield self.psi_samples


def _gauss_legendre_long(m: int):
    """Gauss-Legendre rule polished to long double by Newton steps."""
    rule = gauss_legendre(m)
    x = rule.nodes.astype(np.longdouble)
    one = np.longdouble(1)
    for _ in range(3):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for k in range(1, m):
            p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        dp = m * (x * p1 - p0) / (x * x - one)
        x = x - p1 / dp
    if m % 2:
        x[m // 2] = 0
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(1, m):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = m * (x * p1 - p0) / (x * x - one)
    w = 2 / ((one - x * x) * dp * dp)
    return x, w


def _check_size(c, m, n_count):
    if n_count < 1:
        raise ValueError("n_count must be positive")
    need = 4.0 * (n_count + c)
    if m < need:
        raise ValueError("Nystrom size m = %d too small; need m >= 4 (n_count + c) = %g"
                         % (m, need))


def _sinc_kernel(c, x, y):
    d = x[:, None] - y[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        K = np.sin(c * d) / (np.pi * d)
    K[d == 0] = c / np.pi
    return K


def sinc_nystrom_matrix(c: float, m: int):
    """Symmetrized Nystrom matrix ``W^(1/2) K W^(1/2)`` and the rule."""
    rule = gauss_legendre(m)
    x, w = rule.nodes, rule.weights
    sw = np.sqrt(w)
    A = sw[:, None] * _sinc_kernel(c, x, x) * sw[None, :]
    A = 0.5 * (A + A.T)
    return A, x, w


def _nystrom_sinc(c, m, n_count):
    A, x, w = sinc_nystrom_matrix(c, m)
    vals, vecs = np.linalg.eigh(A)
    order = np.argsort(vals)[::-1][:n_count]
    lam = vals[order]
    psi = (vecs[:, order] / np.sqrt(w)[:, None]).T
    # sign: psi(0) > 0 (even) or psi'(0) > 0 (odd), via the Nystrom extension
    k0 = _sinc_kernel(c, np.zeros(1), x)[0]
    y = -x
    with np.errstate(invalid="ignore", divide="ignore"):
        dk0 = (c * y * np.cos(c * y) - np.sin(c * y)) / (np.pi * y * y)
    dk0[y == 0] = 0.0
    for i in range(n_count):
        if i % 2 == 0:
            s = kernels.dot2(w * k0, psi[i])
        else:
            s = kernels.dot2(w * dk0, psi[i])
        if s < 0:
            psi[i] = -psi[i]
    return NystromResult(lam, psi, x, w, "sinc")


def _parity_block(c, xp, wp, parity):
    cl = np.longdouble(c)
    arg = cl * xp[:, None] * xp[None, :]
    ker = np.cos(arg) if parity == 0 else np.sin(arg)
    s = np.sqrt(2 * wp)
    return s[:, None] * ker * s[None, :]


def _nystrom_fourier(c, m, n_count):
    if m % 2:
        m += 1
    xl, wl = _gauss_legendre_long(m)
    half = m // 2
    xp = xl[half:]
    wp = wl[half:]
    n_even = (n_count + 1) // 2
    n_odd = n_count // 2
    signed = {}
    vecs = {}
    for parity, cnt in ((0, n_even), (1, n_odd)):
        if cnt == 0:
            continue
        Cl = _parity_block(c, xp, wp, parity)
        Cd = np.asarray(Cl, dtype=float)
        vals, V = np.linalg.eigh(0.5 * (Cd + Cd.T))
        order = np.argsort(-np.abs(vals))[:cnt]
        refined = np.empty(cnt)
        for j, idx in enumerate(order.tolist()):
            v = V[:, idx].astype(np.longdouble)
            refined[j] = float((v @ (Cl @ v)) / (v @ v))
        signed[parity] = refined
        vecs[parity] = V[:, order]
    mu_abs = np.empty(n_count)
    psi = np.empty((n_count, m))
    x = np.asarray(xl, dtype=float)
    w = np.asarray(wl, dtype=float)
    xpd = x[half:]
    wpd = w[half:]
    for n in range(n_count):
        p = n % 2
        e = signed[p][n // 2]
        mu_abs[n] = abs(e)
        v = vecs[p][:, n // 2] / np.sqrt(2 * wpd)   # psi on the positive nodes
        # Nystrom extension at 0: e psi(0) = int psi (even), e psi'(0) = c int y psi (odd)
        s = kernels.dot2(wpd, v) if p == 0 else kernels.dot2(wpd * xpd, v)
        if s * e < 0:
            v = -v
        full = np.empty(m)
        full[half:] = v
        full[:half] = v[::-1] * (1.0 if p == 0 else -1.0)
        psi[n] = full
    lam = c * mu_abs ** 2 / (2.0 * math.pi)
    return NystromResult(lam, psi, x, w, "fourier")


def nystrom_lambda(c: float, m: int, n_count: int, kernel: str = "sinc") -> NystromResult:
    """Reference lambda_0 > lambda_1 > ... and psi samples at the quadrature nodes.

    Requires ``m >= 4 (n_count + c)``. Deterministic in ``(c, m, n_count, kernel)``.
    """
    c = float(c)
    if not c > 0:
        raise ValueError("c must be positive")
    _check_size(c, m, n_count)
    if kernel == "sinc":
        return _nystrom_sinc(c, m, n_count)
    if kernel == "fourier":
        return _nystrom_fourier(c, m, n_count)
    raise ValueError("kernel must be 'sinc' or 'fourier', got %r" % (kernel,))


def _evaluate(f, x):
    if hasattr(f, "evaluate"):
        return f.evaluate(x)
    return f(x)


def quadrature_inner_product(f, g, m: int):
    """``int_{-1}^{1} f(x) conj(g(x)) dx`` by an m-point Gauss-Legendre rule.

    ``f`` and ``g`` are callables on arrays or objects with an ``evaluate``
    method. Returns ``(value, error_estimate)``; the estimate is the change
    from the rule of half the size, floored at the accumulated rounding.
    """
    if m < 16:
        raise ValueError("quadrature size must be at least 16")

    def integral(mm):
        rule = gauss_legendre(mm)
        fx = np.asarray(_evaluate(f, rule.nodes))
        gx = np.asarray(_evaluate(g, rule.nodes))
        vals = fx * np.conj(gx)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise ValueError("integrand not finite at x = %r" % float(rule.nodes[i]))
        scale = float(np.sum(rule.weights * np.abs(vals)))
        return rule.integrate(vals), scale

    value, scale = integral(m)
    coarse, _ = integral(max(8, m // 2))
    err = max(abs(value - coarse), 16.0 * 2.0 ** -52 * scale)
    return value, err
