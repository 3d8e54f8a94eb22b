"""Scalar special-function kernels.

Normalized Legendre polynomials ``Pbar_k = sqrt(k + 1/2) P_k`` (orthonormal
on [-1, 1]), half-integer-order Bessel functions, Gauss-Legendre rules and
Legendre moments. The recurrences themselves live in the kernel backend
(compiled or numpy); this module adds validation, caching and the closed
forms.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from prolate._backend import kernels

DOMAIN_SLACK = 1e-12
MAX_QUADRATURE_ORDER = 65536


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


@dataclass(frozen=True)
class QuadratureRule:
    """An m-point Gauss-Legendre rule on [-1, 1].

    ``nodes`` are strictly increasing and symmetric about 0, ``weights`` are
    positive and sum to 2. The arrays are read-only.
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, values) -> complex | float:
        """Compensated sum of ``weights * values`` (real or complex values)."""
        values = np.asarray(values)
        if np.iscomplexobj(values):
            return complex(kernels.dot2(self.weights, values.real.astype(float)),
                           kernels.dot2(self.weights, values.imag.astype(float)))
        return float(kernels.dot2(self.weights, values.astype(float)))

    def __call__(self, func):
        """Integrate a callable over [-1, 1]."""
        return self.integrate(func(self.nodes))


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + DOMAIN_SLACK) or np.any(np.isnan(x)):
        raise DomainError("Legendre evaluation requires |x| <= 1, got max |x| = %r"
                          % float(np.max(np.abs(x))))
    return x


def legendre_batch(k_max: int, x: float) -> np.ndarray:
    """``[Pbar_0(x), ..., Pbar_{k_max}(x)]`` from one pass of the recurrence."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    x = _check_domain(x)
    if x.ndim != 0:
        raise ValueError("legendre_batch takes a scalar x; use legendre_table for arrays")
    return kernels.legendre_table(int(k_max), np.array([float(x)]))[:, 0]


def legendre_table(k_max: int, x) -> np.ndarray:
    """Normalized Legendre values, shape ``(k_max + 1, len(x))``."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    x = _check_domain(np.atleast_1d(x))
    return kernels.legendre_table(int(k_max), x.ravel())


def legendre_normalized(k: int, x: float) -> float:
    """``Pbar_k(x)`` for ``|x| <= 1``."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    return float(legendre_batch(k, x)[k])


def legendre_values_at_zero(k_max: int) -> np.ndarray:
    """``Pbar_k(0)`` for k = 0..k_max.

    Uses ``P_k(0) = (-1)^(k/2) (k-1)!!/k!!`` for even k, built as a running
    product so it never overflows.
    """
    out = np.zeros(k_max + 1)
    p = 1.0
    for k in range(0, k_max + 1, 2):
        out[k] = p * math.sqrt(k + 0.5)
        p = -p * (k + 1) / (k + 2)
    return out


def legendre_derivatives_at_zero(k_max: int) -> np.ndarray:
    """``Pbar_k'(0)`` for k = 0..k_max, via ``P_k'(0) = k P_{k-1}(0)``."""
    out = np.zeros(k_max + 1)
    p = 1.0  # P_{k-1}(0)
    for k in range(1, k_max + 1, 2):
        out[k] = k * p * math.sqrt(k + 0.5)
        p = -p * k / (k + 1)
    return out


# -- Bessel -------------------------------------------------------------------

def spherical_bessel_seq(m_max: int, x: float) -> np.ndarray:
    """``j_0(x) .. j_{m_max}(x)`` for x > 0 (stable in both regimes)."""
    if m_max < 0:
        raise ValueError("order must be non-negative")
    if not x > 0:
        raise DomainError("spherical Bessel functions need x > 0, got %r" % (x,))
    return kernels.sph_bessel_seq(int(m_max), float(x))


def spherical_bessel_table(m_max: int, x) -> np.ndarray:
    """Shape ``(len(x), m_max + 1)``; row i is ``spherical_bessel_seq(m_max, x[i])``."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if x.size and not np.all(x > 0):
        raise DomainError("spherical Bessel functions need x > 0")
    return kernels.sph_bessel_table(int(m_max), x)


def bessel_half_integer_seq(m_max: int, x: float) -> np.ndarray:
    """``J_{m+1/2}(x)`` for m = 0..m_max."""
    return spherical_bessel_seq(m_max, x) * math.sqrt(2.0 * x / math.pi)


def bessel_half_integer(m: int, x: float) -> float:
    """``J_{m+1/2}(x)`` for integer m >= 0 and x > 0.

    Underflowing values come back as 0.
    """
    return float(bessel_half_integer_seq(m, x)[m])


def bessel_half_integer_bound(m: int, x: float) -> float:
    """``(x/2)^(m+1/2) / Gamma(m+3/2)``, the power-series majorant, via log-gamma."""
    if not x > 0:
        raise DomainError("x must be positive")
    log_b = (m + 0.5) * math.log(x / 2.0) - math.lgamma(m + 1.5)
    if log_b < -745.0:
        return 0.0
    if log_b > 709.0:
        return math.inf
    return math.exp(log_b)


# -- quadrature ---------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _gauss_legendre_cached(m: int) -> QuadratureRule:
    nodes, weights = kernels.gauss_legendre_newton(m)
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights, order=m)


def gauss_legendre(m: int) -> QuadratureRule:
    """The m-point Gauss-Legendre rule, 1 <= m <= MAX_QUADRATURE_ORDER (cached)."""
    if isinstance(m, bool) or int(m) != m:
        raise ValueError("quadrature order must be an integer, got %r" % (m,))
    m = int(m)
    if not 1 <= m <= MAX_QUADRATURE_ORDER:
        raise ValueError("quadrature order must lie in [1, %d], got %d" % (MAX_QUADRATURE_ORDER, m))
    return _gauss_legendre_cached(m)


# -- moments ------------------------------------------------------------------

def legendre_diagonal_moment(k: int) -> float:
    """``a_kk = integral of x^k Pbar_k`` = sqrt(pi) sqrt(k+1/2) k! / (2^k Gamma(k+3/2))."""
    log_a = (0.5 * math.log(math.pi) + math.lgamma(k + 1) - k * math.log(2.0)
             - math.lgamma(k + 1.5))
    return math.sqrt(k + 0.5) * math.exp(log_a)


def legendre_moment(j: int, k: int) -> float:
    """``integral_{-1}^{1} x^j Pbar_k(x) dx``.

    Zero for k > j or mismatched parity. Otherwise starts from the closed
    form at k = j and steps down with
    ``m_k = m_{k+2} (j + k + 3) / (j - k)`` on the unnormalized moments.
    """
    if j < 0 or k < 0:
        raise ValueError("j and k must be non-negative")
    if k > j or (j - k) % 2:
        return 0.0
    m = legendre_diagonal_moment(j) / math.sqrt(j + 0.5)
    kk = j - 2
    while kk >= k:
        m = m * (j + kk + 3) / (j - kk)
        kk -= 2
    return math.sqrt(k + 0.5) * m


def legendre_moments(j: int) -> np.ndarray:
    """``[legendre_moment(j, k) for k in 0..j]`` in one downward pass."""
    out = np.zeros(j + 1)
    m = legendre_diagonal_moment(j) / math.sqrt(j + 0.5)
    kk = j
    while kk >= 0:
        out[kk] = math.sqrt(kk + 0.5) * m
        if kk >= 2:
            m = m * (j + kk + 1) / (j - kk + 2)
        kk -= 2
    return out
