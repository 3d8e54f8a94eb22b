"""The PSWF basis: evaluation, finite Fourier transform values, eigenvalues.

``psi_n = sum_k beta_k^n Pbar_k`` on [-1, 1]. The finite Fourier transform
``F_c psi_n(x) = int_{-1}^{1} exp(i c x y) psi_n(y) dy = mu_n psi_n(x)``
has eigenvalues ``mu_n = i^n |mu_n|`` and ``lambda_n = c |mu_n|^2 / (2 pi)``
is the eigenvalue of the sinc-kernel operator.

Using ``int exp(i z y) Pbar_k(y) dy = 2 i^k sqrt(k + 1/2) j_k(z)`` the
transform of psi_n at any real X is

    mu_n psi_n(X) = i^n R_n(X),
    R_n(X) = 2 sum_k (-1)^((k - n)/2) beta_k^n sqrt(k + 1/2) j_k(c X),

which needs no division by ``|mu_n|`` and is the workhorse for evaluating
psi_n outside [-1, 1] and for Fourier-type expansion coefficients.

``|mu_n|`` itself is obtained from the value or slope at 0:
``R_n(0) = |mu_n| psi_n(0)`` with ``R_n(0) = sqrt(2) |beta_0^n|`` for even
n, and ``|mu_n| psi_n'(0) = c sqrt(2/3) |beta_1^n|`` for odd n. Every term
is positive or has a closed form, so nothing cancels; the leading
coefficients are kept relatively accurate by the eigensystem's head
refinement. The classical ratio ``R_n(1) / psi_n(1)`` is available as a
cross-check (``series_mu_abs``); it loses accuracy to cancellation for
small ``|mu_n|`` and is flagged accordingly.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from prolate import __version__
from prolate._backend import BACKEND, kernels
from prolate.eigensystem import TAIL_MASS_TOL, pswf_spectrum
from prolate.specfun import (
    legendre_derivatives_at_zero,
    legendre_table,
    legendre_values_at_zero,
    spherical_bessel_table,
)

FORMAT_VERSION = 1
EPS = 2.0 ** -52
MU_REL_TOL = 1e-6        # |mu| flagged unreliable above this estimated relative error
DD_ESCALATE = 1e-13      # cancellation ratio that switches the series sum to double-double

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class LossOfSignificance(ArithmeticError):
    """|mu_n| is not known to working accuracy for the requested index."""


class CacheVersionError(ValueError):
    """A cached basis was written with a different format version."""


@dataclass(frozen=True, eq=False)
class PswfBasis:
    """Immutable PSWF spectrum for bandwidth ``c`` and indices ``0..n_max``.

    ``beta[n, k]`` is the coefficient of ``Pbar_k`` in ``psi_n`` (zero for
    k of the other parity). ``mu_rel_err`` is an a-priori estimate of the
    relative error of ``mu_abs``; ``loss_flags`` marks indices where it
    exceeds ``MU_REL_TOL``.
    """

    c: float
    n_max: int
    chi: np.ndarray
    beta: np.ndarray
    mu_abs: np.ndarray
    lam: np.ndarray
    loss_flags: np.ndarray
    mu_rel_err: np.ndarray
    psi0: np.ndarray        # psi_n(0) for even n, psi_n'(0) for odd n
    K_even: int
    K_odd: int
    mu_route: str = "moment"

    @property
    def k_max(self) -> int:
        return self.beta.shape[1] - 1

    @property
    def mu_phase(self) -> np.ndarray:
        return np.array([_PHASES[n % 4] for n in range(self.n_max + 1)])

    @property
    def mu(self) -> np.ndarray:
        return self.mu_phase * self.mu_abs

    @property
    def lambdas(self) -> np.ndarray:
        return self.lam

    @property
    def q(self) -> np.ndarray:
        """``c^2 / chi_n``; below 1 outside the plunge region."""
        return self.c * self.c / self.chi

    def __call__(self, n, x):
        return evaluate_inside(self, n, x)


def _check_index(basis: PswfBasis, n: int) -> int:
    if isinstance(n, (bool, np.bool_)) or int(n) != n:
        raise IndexError("PSWF index must be an integer, got %r" % (n,))
    n = int(n)
    if not 0 <= n <= basis.n_max:
        raise IndexError("PSWF index %d outside 0..%d" % (n, basis.n_max))
    return n


def _index_array(basis: PswfBasis, ns) -> np.ndarray:
    if ns is None:
        return np.arange(basis.n_max + 1)
    ns = np.atleast_1d(np.asarray(ns))
    for n in ns.tolist():
        _check_index(basis, n)
    return ns.astype(int)


# -- construction ---------------------------------------------------------------

def _assemble(c, n_max, even, odd):
    K_even = even.truncation_K
    K_odd = odd.truncation_K
    width = max(2 * K_even - 1, 2 * K_odd)
    beta = np.zeros((n_max + 1, width))
    chi = np.zeros(n_max + 1)
    beta[0::2] = even.full_rows(width)
    chi[0::2] = even.chi
    if n_max >= 1:
        beta[1::2] = odd.full_rows(width)
        chi[1::2] = odd.chi
    return chi, beta, K_even, K_odd


def _zero_data(c, beta):
    """psi_n(0) (even n) or psi_n'(0) (odd n) and their condition numbers."""
    kmax = beta.shape[1] - 1
    p0 = legendre_values_at_zero(kmax)
    d0 = legendre_derivatives_at_zero(kmax)
    n_tot = beta.shape[0]
    val = np.zeros(n_tot)
    cond = np.zeros(n_tot)
    for n in range(n_tot):
        ref = p0 if n % 2 == 0 else d0
        val[n] = kernels.dot2(beta[n], ref)
        cond[n] = float(np.sum(np.abs(beta[n] * ref))) / abs(val[n]) if val[n] else math.inf
    return val, cond


def moment_mu_abs(c, beta, psi0=None, cond=None):
    """|mu_n| from ``int psi_n`` (even n) or ``int y psi_n`` (odd n).

    Returns ``(mu_abs, rel_err_estimate)``.
    """
    if psi0 is None:
        psi0, cond = _zero_data(c, beta)
    n_tot = beta.shape[0]
    mu = np.zeros(n_tot)
    for n in range(n_tot):
        if n % 2 == 0:
            mu[n] = math.sqrt(2.0) * abs(beta[n, 0]) / abs(psi0[n])
        else:
            mu[n] = c * math.sqrt(2.0 / 3.0) * abs(beta[n, 1]) / abs(psi0[n])
    rel = 4.0 * EPS * (cond + 2.0)
    return mu, rel


def series_mu_abs(c, beta):
    """|mu_n| = |R_n(1)| / |psi_n(1)| by the Bessel-Legendre ratio.

    The numerator is summed with Dot2 and, when its magnitude falls below
    ``DD_ESCALATE`` times the sum of term magnitudes, recomputed in
    double-double. The returned relative-error estimate accounts for the
    rounding already present in the coefficients, which no summation can
    undo. Returns ``(mu_abs, rel_err_estimate, used_double_double)``.
    """
    beta = np.asarray(beta, dtype=float)
    n_tot, width = beta.shape
    ks = np.arange(width)
    jk = spherical_bessel_table(width - 1, [float(c)])[0]
    root = np.sqrt(ks + 0.5)
    mu = np.zeros(n_tot)
    rel = np.zeros(n_tot)
    used_dd = np.zeros(n_tot, dtype=bool)
    for n in range(n_tot):
        sign = np.where(((ks - n) // 2) % 2 == 0, 1.0, -1.0)
        w = 2.0 * sign * root * jk
        terms_abs = float(np.sum(np.abs(beta[n] * w)))
        num = kernels.dot2(beta[n], w)
        if abs(num) < DD_ESCALATE * terms_abs:
            hi, lo = kernels.dd_dot(beta[n], w)
            num = hi + lo
            used_dd[n] = True
        den = kernels.dot2(beta[n], root)
        den_abs = float(np.sum(np.abs(beta[n] * root)))
        mu[n] = abs(num) / abs(den) if den else math.inf
        cond = (terms_abs / abs(num) if num else math.inf) + (den_abs / abs(den) if den else math.inf)
        rel[n] = 4.0 * EPS * cond
    return mu, rel, used_dd


def build_basis(c: float, n_max: int, mu_route: str = "moment", method: str = "auto") -> PswfBasis:
    """Compute the PSWF basis for bandwidth c and indices 0..n_max.

    ``mu_route`` selects how |mu_n| is obtained: ``"moment"`` (default,
    cancellation-free) or ``"series"`` (Bessel-Legendre ratio).
    """
    c = float(c)
    if not c > 0 or not math.isfinite(c):
        raise ValueError("bandwidth c must be positive and finite, got %r" % (c,))
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 0:
        raise ValueError("n_max must be a non-negative integer, got %r" % (n_max,))
    n_max = int(n_max)
    even, odd = pswf_spectrum(c, n_max, method=method, refine=True)
    chi, beta, K_even, K_odd = _assemble(c, n_max, even, odd)
    psi0, cond0 = _zero_data(c, beta)
    if mu_route == "moment":
        mu, rel = moment_mu_abs(c, beta, psi0, cond0)
    elif mu_route == "series":
        mu, rel, _ = series_mu_abs(c, beta)
    else:
        raise ValueError("mu_route must be 'moment' or 'series', got %r" % (mu_route,))
    lam = c * mu * mu / (2.0 * math.pi)
    flags = rel > MU_REL_TOL
    for a in (chi, beta, mu, lam, flags, rel, psi0):
        a.setflags(write=False)
    return PswfBasis(c=c, n_max=n_max, chi=chi, beta=beta, mu_abs=mu, lam=lam,
                     loss_flags=flags, mu_rel_err=rel, psi0=psi0,
                     K_even=K_even, K_odd=K_odd, mu_route=mu_route)


# -- evaluation -----------------------------------------------------------------

def psi_matrix(basis: PswfBasis, x, ns=None) -> np.ndarray:
    """``psi_n(x_j)`` for x in [-1, 1]; shape ``(len(ns), len(x))``."""
    ns = _index_array(basis, ns)
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    table = legendre_table(basis.k_max, x)
    return kernels.dot2_matmul(basis.beta[ns], table)


def evaluate_inside(basis: PswfBasis, n: int, x):
    """``psi_n(x)`` for ``|x| <= 1`` (scalar or array x)."""
    n = _check_index(basis, n)
    scalar = np.ndim(x) == 0
    vals = psi_matrix(basis, x, [n])[0]
    return float(vals[0]) if scalar else vals.reshape(np.shape(x))


def finite_fourier_reduced(basis: PswfBasis, X, ns=None) -> np.ndarray:
    """Real ``R_n(X)`` with ``mu_n psi_n(X) = i^n R_n(X)``; shape ``(len(ns), len(X))``."""
    ns = _index_array(basis, ns)
    X = np.atleast_1d(np.asarray(X, dtype=float)).ravel()
    out = np.zeros((ns.size, X.size))
    ax = np.abs(X)
    zero = ax == 0.0
    nz = ~zero
    if np.any(nz):
        width = basis.beta.shape[1]
        ks = np.arange(width)
        root = 2.0 * np.sqrt(ks + 0.5)
        J = spherical_bessel_table(width - 1, basis.c * ax[nz])
        W = np.empty((ns.size, width))
        for i, n in enumerate(ns.tolist()):
            sign = np.where(((ks - n) // 2) % 2 == 0, 1.0, -1.0)
            W[i] = basis.beta[n] * sign * root
        vals = kernels.dot2_matmul(W, np.ascontiguousarray(J.T))
        neg = X[nz] < 0
        odd = (ns % 2 == 1)
        vals[np.ix_(odd, neg)] *= -1.0
        out[:, nz] = vals
    if np.any(zero):
        # only k = 0 survives: R_n(0) = (-1)^(n/2) sqrt(2) beta_0 for even n
        for i, n in enumerate(ns.tolist()):
            if n % 2 == 0:
                out[i, zero] = (-1.0) ** (n // 2) * math.sqrt(2.0) * basis.beta[n, 0]
    return out


def finite_fourier_value(basis: PswfBasis, n: int, X):
    """``mu_n psi_n(X) = int_{-1}^{1} exp(i c X y) psi_n(y) dy`` without dividing by |mu_n|."""
    n = _check_index(basis, n)
    scalar = np.ndim(X) == 0
    r = finite_fourier_reduced(basis, X, [n])[0] * _PHASES[n % 4]
    return complex(r[0]) if scalar else r.reshape(np.shape(X))


def evaluate_outside(basis: PswfBasis, n: int, x):
    """``psi_n(x)`` for any real ``x != 0`` by the analytic extension."""
    n = _check_index(basis, n)
    if basis.loss_flags[n]:
        raise LossOfSignificance(
            "|mu_%d| is flagged unreliable (estimated relative error %.2e)"
            % (n, basis.mu_rel_err[n]))
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa == 0.0):
        raise ValueError("evaluate_outside is undefined at x = 0; use evaluate_inside")
    vals = finite_fourier_reduced(basis, xa.ravel(), [n])[0] / basis.mu_abs[n]
    return float(vals[0]) if scalar else vals.reshape(xa.shape)


def value_at_one(basis: PswfBasis) -> np.ndarray:
    """``psi_n(1) = sum_k beta_k sqrt(k + 1/2)`` for all n."""
    root = np.sqrt(np.arange(basis.beta.shape[1]) + 0.5)
    return np.array([kernels.dot2(row, root) for row in basis.beta])


def plunge_index(basis: PswfBasis):
    """First n with ``lambda_n < 1/2``, or None if every computed lambda is above it."""
    below = np.flatnonzero(np.asarray(basis.lam) < 0.5)
    return int(below[0]) if below.size else None


def derivatives_at_zero(basis: PswfBasis, n: int, k_max: int, scale: float = 1.0):
    """``psi_n^(k)(0) / scale^k`` for k = 0..k_max.

    Seeds come from the Legendre sums; higher orders from differentiating
    the differential equation at 0. A ``scale`` near ``sqrt(chi_n)`` or c
    keeps high orders in range. Returns ``(values, in_regime)`` where
    ``in_regime`` is False once ``k_max (k_max + 1) > chi_n``; the values
    are still returned, and a RuntimeWarning is issued.
    """
    n = _check_index(basis, n)
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    if not scale > 0:
        raise ValueError("scale must be positive")
    chi = float(basis.chi[n])
    c2 = basis.c * basis.c
    s2 = scale * scale
    d = np.zeros(k_max + 1)
    if n % 2 == 0:
        d[0] = basis.psi0[n]
    elif k_max >= 1:
        d[1] = basis.psi0[n] / scale
    for k in range(0, k_max - 1):
        prev = d[k - 2] if k >= 2 else 0.0
        d[k + 2] = (k * (k + 1) - chi) / s2 * d[k] + k * (k - 1) * c2 / (s2 * s2) * prev
    in_regime = k_max * (k_max + 1) <= chi
    if not in_regime:
        warnings.warn("derivative order %d exceeds the regime k(k+1) <= chi_n = %.6g"
                      % (k_max, chi), RuntimeWarning, stacklevel=2)
    return d, in_regime


def moment(basis: PswfBasis, n: int, j: int) -> float:
    """``int_{-1}^{1} y^j psi_n(y) dy`` from the j-th derivative at 0.

    Uses ``int y^j psi_n = (-i)^j c^(-j) mu_n psi_n^(j)(0)``; the phases
    combine to the real sign ``(-1)^((n - j)/2)``.
    """
    n = _check_index(basis, n)
    if j < 0:
        raise ValueError("moment order must be non-negative")
    if (n - j) % 2:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        d, _ = derivatives_at_zero(basis, n, j, scale=basis.c)
    sign = 1.0 if ((n - j) // 2) % 2 == 0 else -1.0
    return sign * basis.mu_abs[n] * d[j]


# -- cache ----------------------------------------------------------------------

_ARRAYS = ("chi", "beta", "mu_abs", "lam", "loss_flags", "mu_rel_err", "psi0")


def _metadata(basis: PswfBasis) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "c": basis.c.hex(),
        "c_repr": repr(basis.c),
        "n_max": basis.n_max,
        "K_even": basis.K_even,
        "K_odd": basis.K_odd,
        "mu_route": basis.mu_route,
        "tolerances": {"tail_mass": TAIL_MASS_TOL, "mu_rel": MU_REL_TOL,
                       "dd_escalate": DD_ESCALATE},
        "library_version": __version__,
    }


def save_basis(basis: PswfBasis, path) -> None:
    """Write the basis as an ``.npz`` record (bit-exact floats) with JSON metadata."""
    path = os.fspath(path)
    arrays = {name: np.asarray(getattr(basis, name)) for name in _ARRAYS}
    meta = json.dumps(_metadata(basis), sort_keys=True)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        np.savez(fh, meta=np.array(meta), **arrays)
    os.replace(tmp, path)


def load_basis(path) -> PswfBasis:
    with np.load(os.fspath(path), allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format_version") != FORMAT_VERSION:
            raise CacheVersionError("cache format %r, expected %r"
                                    % (meta.get("format_version"), FORMAT_VERSION))
        arrays = {name: np.array(data[name]) for name in _ARRAYS}
    for a in arrays.values():
        a.setflags(write=False)
    return PswfBasis(c=float.fromhex(meta["c"]), n_max=int(meta["n_max"]),
                     K_even=int(meta["K_even"]), K_odd=int(meta["K_odd"]),
                     mu_route=meta["mu_route"], **arrays)


def cache_key(c: float, n_max: int, mu_route: str = "moment") -> str:
    tol = "%r|%r|%r" % (TAIL_MASS_TOL, MU_REL_TOL, DD_ESCALATE)
    raw = "%s|%d|%s|%s|v%d" % (float(c).hex(), n_max, mu_route, tol, FORMAT_VERSION)
    return hashlib.sha256(raw.encode()).hexdigest()[:20]


def cached_basis(c: float, n_max: int, cache_dir=None, mu_route: str = "moment") -> PswfBasis:
    """Load the basis from ``cache_dir`` if present and current, else build and store it."""
    if cache_dir is None:
        return build_basis(c, n_max, mu_route=mu_route)
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, "basis-%s.npz" % cache_key(c, n_max, mu_route))
    if os.path.exists(path):
        try:
            basis = load_basis(path)
            if basis.c == float(c) and basis.n_max == n_max and basis.mu_route == mu_route:
                return basis
        except (CacheVersionError, KeyError, ValueError, OSError):
            pass
    basis = build_basis(c, n_max, mu_route=mu_route)
    save_basis(basis, path)
    return basis


def backend_name() -> str:
    return BACKEND
