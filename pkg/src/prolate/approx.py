"""PSWF expansion coefficients, truncated projections and error metrics.

``a_n(f) = int_{-1}^{1} f psi_n`` is available by three routes:

* ``coeff_quadrature``: Gauss-Legendre quadrature of ``f psi_n``;
* ``coeff_fourier``: from the Fourier coefficients of a periodic f,
  ``a_n = (1/sqrt 2) sum_k b_k mu_n psi_n(k pi / c)``, where the product
  ``mu_n psi_n`` is taken from ``finite_fourier_value`` (never dividing by
  a small ``|mu_n|``);
* closed forms: ``exp(i lam x)`` gives ``a_n = mu_n psi_n(lam / c)`` and the
  Weierstrass function is a sum of such cosines.

Partial sums: ``project(..., N)`` uses the indices ``n < N``; passing
``inclusive=True`` where offered uses ``n <= N`` instead.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from prolate._backend import kernels
from prolate.functions import (
    Bump,
    Exponential,
    FunctionSpec,
    Sinc,
    Weierstrass,
)
from prolate.pswf import PswfBasis, finite_fourier_reduced, psi_matrix
from prolate.specfun import gauss_legendre, spherical_bessel_seq

_PHASES = np.array([1.0, 1.0j, -1.0, -1.0j])

CSV_SCHEMA = 1
SWEEP_HEADER = "c,N,s,error_grid,error_quad,band_component,tail_component"


@dataclass(frozen=True)
class ExpansionCoefficients:
    values: np.ndarray
    method: str
    parameter: int | None
    basis_c: float
    basis_n_max: int

    def __len__(self):
        return self.values.size

    def __getitem__(self, n):
        return self.values[n]


@dataclass
class ApproximationReport:
    c: float
    N: int
    s: float | None
    error_l2_grid: float
    error_l2_quadrature: float
    band_part: float | None
    tail_part: float
    runtime_ms: float = 0.0
    extras: dict = field(default_factory=dict)

    def csv_row(self) -> str:
        return ",".join([
            _fmt_param(self.c), str(self.N),
            "" if self.s is None else _fmt_param(self.s),
            _fmt(self.error_l2_grid), _fmt(self.error_l2_quadrature),
            "" if self.band_part is None else _fmt(self.band_part),
            _fmt(self.tail_part),
        ])


def _fmt(v: float) -> str:
    return "%.8e" % v


def _fmt_param(v: float) -> str:
    return "%.9g" % v


def _phase(ns) -> np.ndarray:
    return _PHASES[np.asarray(ns) % 4]


def _make(values, method, parameter, basis):
    values = np.asarray(values, dtype=complex)
    values.setflags(write=False)
    return ExpansionCoefficients(values, method, parameter, basis.c, basis.n_max)


def _check_count(basis: PswfBasis, n_count: int) -> int:
    if n_count < 0 or n_count > basis.n_max + 1:
        raise ValueError("n_count must lie in 0..%d" % (basis.n_max + 1))
    return int(n_count)


def _cmatvec(A, v):
    """Compensated ``A @ v`` for real A and real or complex v."""
    v = np.asarray(v)
    re = kernels.dot2_matmul(A, np.ascontiguousarray(v.real, dtype=float)[:, None])[:, 0]
    if np.iscomplexobj(v):
        im = kernels.dot2_matmul(A, np.ascontiguousarray(v.imag, dtype=float)[:, None])[:, 0]
        return re + 1j * im
    return re.astype(complex)


# -- coefficient routes ----------------------------------------------------------

def coeff_quadrature(f, basis: PswfBasis, n_count: int, m: int) -> ExpansionCoefficients:
    """``a_n ~ sum_l w_l f(x_l) psi_n(x_l)`` for n < n_count with an m-point rule."""
    n_count = _check_count(basis, n_count)
    rule = gauss_legendre(m)
    fx = f.evaluate(rule.nodes) if hasattr(f, "evaluate") else f(rule.nodes)
    fx = np.asarray(fx)
    bad = ~np.isfinite(fx)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ValueError("function not finite at node x = %r" % float(rule.nodes[i]))
    P = psi_matrix(basis, rule.nodes, np.arange(n_count)) * rule.weights[None, :]
    return _make(_cmatvec(P, fx), "quadrature", m, basis)


def coeff_fourier(b, basis: PswfBasis, n_count: int, K: int) -> ExpansionCoefficients:
    """``a_n^K = (1/sqrt 2) sum_{|k| <= K} b_k mu_n psi_n(k pi / c)``.

    ``b`` is a mapping ``k -> b_k`` or a FunctionSpec with Fourier
    coefficients; missing keys count as zero.
    """
    if K < 1:
        raise ValueError("Fourier truncation K must be at least 1")
    n_count = _check_count(basis, n_count)
    if hasattr(b, "fourier_coefficients"):
        b = b.fourier_coefficients()
    ns = np.arange(n_count)
    ks = np.arange(1, K + 1)
    bp = np.array([complex(b.get(int(k), 0.0)) for k in ks])
    bm = np.array([complex(b.get(-int(k), 0.0)) for k in ks])
    b0 = complex(b.get(0, 0.0))
    R = finite_fourier_reduced(basis, ks * math.pi / basis.c, ns) if n_count else np.zeros((0, K))
    even = ns % 2 == 0
    out = np.zeros(n_count, dtype=complex)
    if np.any(even):
        out[even] = _cmatvec(R[even], bp + bm)
    if np.any(~even):
        out[~even] = _cmatvec(R[~even], bp - bm)
    if b0 != 0 and n_count:
        R0 = finite_fourier_reduced(basis, [0.0], ns)[:, 0]
        out += b0 * R0
    out = out * _phase(ns) / math.sqrt(2.0)
    return _make(out, "fourier_resample", K, basis)


def coeff_closed_form_exponential(lam: float, basis: PswfBasis, n_count: int) -> ExpansionCoefficients:
    """``int exp(i lam x) psi_n(x) dx = mu_n psi_n(lam / c)``."""
    n_count = _check_count(basis, n_count)
    ns = np.arange(n_count)
    R = finite_fourier_reduced(basis, [lam / basis.c], ns)[:, 0]
    return _make(R * _phase(ns), "closed_form", None, basis)


def weierstrass_coefficients(s: float, basis: PswfBasis, n_count: int) -> ExpansionCoefficients:
    """Exact coefficients of the (truncated) Weierstrass function.

    ``a_n = sum_k 2^(-k s) Re[mu_n psi_n(2^k / c)]``, nonzero only for even n.
    """
    n_count = _check_count(basis, n_count)
    f = Weierstrass(s)
    amp, freq = f.amplitudes()
    ns = np.arange(n_count)
    R = finite_fourier_reduced(basis, freq / basis.c, ns)
    vals = np.zeros(n_count, dtype=complex)
    even = ns % 2 == 0
    sign = np.where((ns // 2) % 2 == 0, 1.0, -1.0)
    if np.any(even):
        vals[even] = sign[even] * kernels.dot2_matmul(R[even], amp[:, None])[:, 0]
    return _make(vals, "closed_form", f.terms, basis)


def coefficients(f: FunctionSpec, basis: PswfBasis, n_count: int, route: str = "auto",
                 m: int | None = None, K: int | None = None) -> ExpansionCoefficients:
    """Dispatch to a coefficient route; ``auto`` picks the exact one when available."""
    if route == "auto":
        if isinstance(f, Exponential):
            route = "closed_form"
        elif isinstance(f, Weierstrass):
            route = "closed_form"
        elif f.kind in ("random_series", "fourier"):
            route = "fourier"
        else:
            route = "quadrature"
    if route == "closed_form":
        if isinstance(f, Exponential):
            return coeff_closed_form_exponential(f.lam, basis, n_count)
        if isinstance(f, Weierstrass):
            return weierstrass_coefficients(f.s, basis, n_count)
        raise ValueError("no closed form for %s functions" % f.kind)
    if route == "fourier":
        b = f.fourier_coefficients()
        if K is None:
            K = max(abs(k) for k in b) if b else 1
        return coeff_fourier(b, basis, n_count, K)
    if route == "quadrature":
        if m is None:
            m = default_quadrature_order(basis)
        return coeff_quadrature(f, basis, n_count, m)
    raise ValueError("unknown coefficient route %r" % (route,))


def default_quadrature_order(basis: PswfBasis) -> int:
    return int(max(256, 4 * (basis.n_max + math.ceil(basis.c))))


# -- Legendre baseline -------------------------------------------------------------

def legendre_baseline(lam: float, n_count: int) -> np.ndarray:
    """Legendre coefficients ``int exp(i lam x) Pbar_n = i^n 2 sqrt(n + 1/2) j_n(lam)``."""
    out = np.zeros(n_count, dtype=complex)
    if n_count == 0:
        return out
    if lam == 0:
        out[0] = math.sqrt(2.0)
        return out
    ns = np.arange(n_count)
    j = spherical_bessel_seq(n_count - 1, abs(lam))
    if lam < 0:
        j = j * np.where(ns % 2 == 0, 1.0, -1.0)
    return _phase(ns) * 2.0 * np.sqrt(ns + 0.5) * j


def legendre_tail_error(lam: float, N: int, first_dropped: int | None = None,
                        real_part: bool = False) -> float:
    """L2 error of the Legendre partial sum of ``exp(i lam x)`` (or ``cos(lam x)``).

    The dropped terms are ``n >= first_dropped`` (default ``N + 1``):
    ``sum_{n dropped} 4 (n + 1/2) j_n(lam)^2``, a sum of positive terms.
    With ``real_part`` only even n contribute (the expansion of ``cos``).
    """
    if first_dropped is None:
        first_dropped = N + 1
    if lam == 0:
        return 0.0 if first_dropped >= 1 else math.sqrt(2.0)
    top = int(max(first_dropped, abs(lam)) + 60 + 3 * math.sqrt(abs(lam)))
    j = spherical_bessel_seq(top, abs(lam))
    ns = np.arange(top + 1)
    terms = 4.0 * (ns + 0.5) * j * j
    mask = ns >= first_dropped
    if real_part:
        mask &= ns % 2 == 0
    return math.sqrt(float(np.sum(terms[mask][::-1])))


def pswf_tail_error(lam: float, basis: PswfBasis, N: int, first_dropped: int | None = None,
                    real_part: bool = False) -> float:
    """L2 error of the PSWF partial sum of ``exp(i lam x)`` (or ``cos(lam x)``).

    ``sum_{n dropped} |mu_n psi_n(lam / c)|^2`` over ``first_dropped <= n <= n_max``.
    The basis must extend far enough that the terms have died out.
    """
    if first_dropped is None:
        first_dropped = N + 1
    ns = np.arange(basis.n_max + 1)
    R = finite_fourier_reduced(basis, [lam / basis.c], ns)[:, 0]
    mask = ns >= first_dropped
    if real_part:
        mask &= ns % 2 == 0
    return math.sqrt(float(np.sum((R[mask] ** 2)[::-1])))


# -- projections and errors ----------------------------------------------------------

def _terms(N, inclusive):
    return N + 1 if inclusive else N


def project(coeffs: ExpansionCoefficients, basis: PswfBasis, N: int, x, inclusive: bool = False):
    """``S_N f(x) = sum_{n < N} a_n psi_n(x)`` (``n <= N`` with ``inclusive``)."""
    M = _terms(N, inclusive)
    if M > len(coeffs):
        raise ValueError("partial sum needs %d coefficients, only %d available" % (M, len(coeffs)))
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if M == 0:
        out = np.zeros(xs.size, dtype=complex)
    else:
        P = psi_matrix(basis, xs, np.arange(M))
        out = _cmatvec(np.ascontiguousarray(P.T), coeffs.values[:M])
    if scalar:
        return complex(out[0])
    return out.reshape(np.shape(x))


GRID = np.arange(-50, 51) / 50.0


def grid_error(f, coeffs: ExpansionCoefficients, basis: PswfBasis, N: int,
               inclusive: bool = False) -> float:
    """``[(1/50) sum_{k=-50}^{50} |S_N f(k/50) - f(k/50)|^2]^(1/2)``."""
    approx = project(coeffs, basis, N, GRID, inclusive=inclusive)
    exact = f.evaluate(GRID) if hasattr(f, "evaluate") else f(GRID)
    diff = np.abs(approx - exact) ** 2
    return math.sqrt(float(np.sum(diff)) / 50.0)


def quadrature_error(f, coeffs: ExpansionCoefficients, basis: PswfBasis, N: int,
                     m: int = 2048, inclusive: bool = False) -> float:
    """``||f - S_N f||`` in L2(-1, 1) by an m-point rule."""
    rule = gauss_legendre(m)
    approx = project(coeffs, basis, N, rule.nodes, inclusive=inclusive)
    exact = f.evaluate(rule.nodes) if hasattr(f, "evaluate") else f(rule.nodes)
    return math.sqrt(float(kernels.dot2(rule.weights, np.abs(approx - exact) ** 2)))


# -- concentration -------------------------------------------------------------------

def concentration(f: FunctionSpec, c: float, m: int = 24):
    """``(eps_T, eps_Omega)``: L2(R) mass outside [-1, 1] and outside the band [-c, c].

    Supported for the unit-norm kinds ``sinc`` and ``bump``.
    """
    if isinstance(f, Sinc):
        return math.sqrt(max(f.time_tail_sq(), 0.0)), math.sqrt(f.band_tail_sq(c))
    if isinstance(f, Bump):
        return 0.0, math.sqrt(f.band_tail_sq(c))
    raise TypeError("concentration is not available for %s functions" % f.kind)


# -- Sobolev report ------------------------------------------------------------------

def default_sobolev_exponent(f: FunctionSpec) -> float | None:
    """A Sobolev exponent the function is known to have (strictly inside its range)."""
    if isinstance(f, Weierstrass):
        return 0.95 * f.s
    if f.kind == "random_series":
        return 0.95 * (f.s - 0.5)
    if isinstance(f, Exponential):
        return 2.0
    return None


def sobolev_report(f: FunctionSpec, basis: PswfBasis, N: int, coeffs: ExpansionCoefficients | None = None,
                   s: float | None = None, inclusive: bool = False, m: int = 2048) -> ApproximationReport:
    """Measured errors of ``S_N f`` next to the two terms of the Sobolev error bound.

    ``band_part = (1 + c^2)^(-s/2) ||f||_{H^s}`` (frequency-content proxy) and
    ``tail_part = sqrt(lambda_N) ||f||_2``; their constant is not known, so
    they are reported rather than compared.
    """
    t0 = time.perf_counter()
    M = _terms(N, inclusive)
    if coeffs is None:
        coeffs = coefficients(f, basis, min(basis.n_max + 1, max(M, 1)))
    eg = grid_error(f, coeffs, basis, N, inclusive=inclusive)
    eq = quadrature_error(f, coeffs, basis, N, m=m, inclusive=inclusive)
    s_eff = default_sobolev_exponent(f) if s is None else s
    band = None
    if s_eff is not None:
        hs = f.sobolev_norm_sq(s_eff)
        if hs is not None:
            band = (1.0 + basis.c ** 2) ** (-s_eff / 2.0) * math.sqrt(hs)
    lamN = float(basis.lam[min(N, basis.n_max)])
    tail = math.sqrt(lamN) * math.sqrt(f.l2_norm_sq())
    fs = getattr(f, "s", None)
    return ApproximationReport(basis.c, N, fs, eg, eq, band, tail,
                               runtime_ms=1000.0 * (time.perf_counter() - t0),
                               extras={"s_used": s_eff})


def fit_rate(Ns, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(N)``."""
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    slope, _ = np.linalg.lstsq(A, y, rcond=None)[0]
    return float(slope)


def sweep_csv(reports) -> str:
    """CSV text: schema line, header, one row per report, '\\n' line ends."""
    lines = ["# schema=%d" % CSV_SCHEMA, SWEEP_HEADER]
    lines.extend(r.csv_row() for r in reports)
    return "\n".join(lines) + "\n"


# -- Weierstrass error table ---------------------------------------------------------

TABLE_N = (20, 30, 40, 50, 60, 70, 80, 90, 100)
TABLE_S = (0.75, 1.0, 1.25, 1.5, 1.75, 2.0)


def weierstrass_table(basis: PswfBasis, N_list=TABLE_N, s_list=TABLE_S, inclusive: bool = True):
    """Grid errors of Weierstrass partial sums: ``{(N, s): E_N(s)}``.

    The partial sum keeps the indices ``n <= N`` by default.
    """
    need = max(N_list) + (1 if inclusive else 0)
    if need > basis.n_max + 1:
        raise ValueError("basis n_max = %d too small for N = %d" % (basis.n_max, max(N_list)))
    out = {}
    for s in s_list:
        f = Weierstrass(s)
        coeffs = weierstrass_coefficients(s, basis, need)
        for N in N_list:
            out[(N, s)] = grid_error(f, coeffs, basis, N, inclusive=inclusive)
    return out
