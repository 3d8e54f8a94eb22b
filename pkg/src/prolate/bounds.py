"""Executable checks of the structural inequalities satisfied by PSWFs.

Every check walks a basis, evaluates both sides of an inequality
``lhs <= rhs`` over its stated range of validity and returns a
``BoundReport``. A case is a violation when ``rhs - lhs`` falls below
``-slack``; the default slack is ``1e-12 * max(1, |rhs|)``.

Sign convention: the basis fixes ``psi_n(0) > 0`` (even n) and
``psi_n'(0) > 0`` (odd n). With ``mu_n = i^n |mu_n|`` the coefficients
``beta_0^n`` / ``beta_1^n`` and the low moments then carry the sign
``(-1)^floor(n/2)``; positivity statements are checked on the
sign-adjusted quantities.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from prolate._backend import kernels
from prolate.pswf import PswfBasis, derivatives_at_zero, value_at_one
from prolate.specfun import bessel_half_integer_seq, legendre_moments

SLACK_REL = 1e-12
POSITIVITY_SLACK = 1e-13
LAMBDA_SLOPE_MAX = -0.1
BETA_SIGN_CONST = 1.13


@dataclass
class BoundReport:
    name: str
    c: float
    n_max: int
    n_range: tuple = (0, -1)
    k_range: tuple = (0, -1)
    worst_margin: float = math.inf
    violations: list = field(default_factory=list)
    cases: int = 0
    skipped: list = field(default_factory=list)
    inconclusive: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, n, k, lhs, rhs, slack=None):
        """Register the case ``lhs <= rhs``."""
        lhs = float(lhs)
        rhs = float(rhs)
        margin = rhs - lhs
        if slack is None:
            slack = SLACK_REL * max(1.0, abs(rhs))
        self.cases += 1
        self.worst_margin = min(self.worst_margin, margin)
        if not margin >= -slack:
            self.violations.append((int(n), int(k), lhs, rhs))
        if self.cases == 1:
            self.n_range = (int(n), int(n))
            self.k_range = (int(k), int(k))
        else:
            self.n_range = (min(self.n_range[0], int(n)), max(self.n_range[1], int(n)))
            self.k_range = (min(self.k_range[0], int(k)), max(self.k_range[1], int(k)))

    def header(self) -> str:
        status = "inconclusive" if self.inconclusive else ("ok" if self.ok else "violated")
        return ("# bound=%s c=%.9g n_max=%d cases=%d worst_margin=%.8e violations=%d "
                "skipped=%d status=%s" % (self.name, self.c, self.n_max, self.cases,
                                          self.worst_margin, len(self.violations),
                                          len(self.skipped), status))

    def to_text(self) -> str:
        lines = [self.header(), "name,n,k,lhs,rhs,margin"]
        for n, k, lhs, rhs in sorted(self.violations):
            lines.append("%s,%d,%d,%.8e,%.8e,%.8e" % (self.name, n, k, lhs, rhs, rhs - lhs))
        return "\n".join(lines) + "\n"


def _report(name, basis):
    return BoundReport(name, basis.c, basis.n_max)


def _sign_adjust(n: int) -> float:
    return 1.0 if (n // 2) % 2 == 0 else -1.0


# -- chi ---------------------------------------------------------------------------

def check_chi_bounds(basis: PswfBasis) -> BoundReport:
    """``n(n+1) <= chi_n <= n(n+1) + c^2``; and for ``q <= 1`` also
    ``n(n+1) + (3 - 2 sqrt 2) c^2 <= chi_n <= (pi (n+1) / 2)^2``.

    Cases are labelled with k = 0 (classical pair) or k = 1 (sharper pair).
    """
    r = _report("chi_bounds", basis)
    c2 = basis.c ** 2
    for n in range(basis.n_max + 1):
        chi = float(basis.chi[n])
        base = n * (n + 1.0)
        r.record(n, 0, base, chi)
        r.record(n, 0, chi, base + c2)
        if c2 <= chi:
            r.record(n, 1, base + (3.0 - 2.0 * math.sqrt(2.0)) * c2, chi)
            r.record(n, 1, chi, (math.pi * (n + 1) / 2.0) ** 2)
    return r


# -- beta ----------------------------------------------------------------------------

def beta_sign_range(basis: PswfBasis, n: int) -> int:
    """Largest k with ``k(k-1) + 1.13 c^2 <= chi_n`` (-1 if none)."""
    chi = float(basis.chi[n])
    rest = chi - BETA_SIGN_CONST * basis.c ** 2
    if rest < 0:
        return -1
    k = int(math.floor(0.5 + math.sqrt(0.25 + rest)))
    while k * (k - 1) > rest:
        k -= 1
    while (k + 1) * k <= rest:
        k += 1
    return k


def check_beta_structure(basis: PswfBasis) -> BoundReport:
    """Sign, growth and decay of the leading Legendre coefficients.

    For each n with ``c^2 < chi_n`` and every k of the parity of n with
    ``k(k-1) + 1.13 c^2 <= chi_n``:

    * sign-adjusted ``beta_k^n >= -1e-13``;
    * ``|beta_k^n| <= |beta_{k+2}^n|`` while k + 2 is still admissible;
    * ``|beta_0^n| <= |mu_n| / sqrt 2`` and, for k >= 1,
      ``|beta_k^n| <= sqrt(5 / (4 pi)) (2 / sqrt q)^k |mu_n|``.

    Entries of the other parity must be exactly zero. Indices whose
    ``|mu_n|`` is flagged unreliable are skipped for the decay bound.
    """
    r = _report("beta_structure", basis)
    c2 = basis.c ** 2
    width = basis.beta.shape[1]
    ks = np.arange(width)
    for n in range(basis.n_max + 1):
        row = basis.beta[n]
        other = row[(ks - n) % 2 == 1]
        r.record(n, -1, float(np.max(np.abs(other))) if other.size else 0.0, 0.0, slack=0.0)
        chi = float(basis.chi[n])
        if not c2 < chi:
            continue
        kmax = min(beta_sign_range(basis, n), width - 1)
        if kmax < 0:
            continue
        sgn = _sign_adjust(n)
        q = c2 / chi
        mu = float(basis.mu_abs[n])
        flagged = bool(basis.loss_flags[n])
        if flagged:
            r.skipped.append(n)
        for k in range(n % 2, kmax + 1, 2):
            b = sgn * row[k]
            r.record(n, k, -b, 0.0, slack=POSITIVITY_SLACK)
            if k + 2 <= kmax:
                r.record(n, k, b, sgn * row[k + 2], slack=POSITIVITY_SLACK)
            if flagged:
                continue
            if k == 0:
                r.record(n, k, abs(row[0]), mu / math.sqrt(2.0))
            else:
                log_rhs = (0.5 * math.log(5.0 / (4.0 * math.pi))
                           + k * math.log(2.0 / math.sqrt(q)) + math.log(mu))
                rhs = math.exp(min(log_rhs, 700.0))
                r.record(n, k, abs(row[k]), rhs)
    return r


def admissible_range_witness(basis: PswfBasis, A: float = math.sqrt(2.0), B: float | None = None) -> BoundReport:
    """For ``n >= c A`` and ``k <= n / B`` the precondition of the beta
    bounds, ``k(k-1) + 1.13 c^2 <= chi_n``, holds (requires ``A^2 + B^2 >= A^2 B^2``)."""
    if B is None:
        B = A
    if not (A > 1 and B > 1 and A * A + B * B >= A * A * B * B * (1 - 1e-15)):
        raise ValueError("need A, B > 1 with A^2 + B^2 >= A^2 B^2")
    r = _report("admissible_range_witness", basis)
    c2 = basis.c ** 2
    for n in range(int(math.ceil(basis.c * A)), basis.n_max + 1):
        chi = float(basis.chi[n])
        for k in range(0, int(math.floor(n / B)) + 1):
            r.record(n, k, k * (k - 1) + BETA_SIGN_CONST * c2, chi)
    return r


# -- derivatives and moments -------------------------------------------------------

def _seed_norm(basis, n):
    chi = float(basis.chi[n])
    p0 = float(basis.psi0[n])
    return abs(p0) if n % 2 == 0 else abs(p0) / math.sqrt(chi)


def check_value_bound(basis: PswfBasis, q_max: float = 2.0) -> BoundReport:
    """``psi_n(0)^2 + psi_n'(0)^2 / chi_n <= 1`` for ``q = c^2 / chi_n < q_max``."""
    r = _report("value_at_zero", basis)
    for n in range(basis.n_max + 1):
        if basis.q[n] < q_max:
            r.record(n, 0, _seed_norm(basis, n) ** 2, 1.0)
    return r


def check_derivative_bound(basis: PswfBasis) -> BoundReport:
    """``|psi^(k)(0)| <= chi^(k/2) (psi(0)^2 + psi'(0)^2 / chi)^(1/2)`` when
    ``c^2 < chi_n`` and ``k(k+1) <= chi_n``; also the alternating signs of
    ``psi^(k)(0)`` over k of the parity of n."""
    r = _report("derivative_bound", basis)
    c2 = basis.c ** 2
    for n in range(basis.n_max + 1):
        chi = float(basis.chi[n])
        if not c2 < chi:
            continue
        kmax = int(math.floor((-1.0 + math.sqrt(1.0 + 4.0 * chi)) / 2.0))
        while kmax * (kmax + 1) > chi:
            kmax -= 1
        # scaled values psi^(k)(0) chi^(-k/2)
        d, _ = derivatives_at_zero(basis, n, kmax, scale=math.sqrt(chi))
        m0 = _seed_norm(basis, n)
        p = n % 2
        for k in range(p, kmax + 1, 2):
            r.record(n, k, abs(d[k]), m0)
            if k >= p + 2:
                r.record(n, k, d[k] * d[k - 2], 0.0,
                         slack=SLACK_REL * abs(d[k] * d[k - 2]))
    return r


def legendre_route_moment(basis: PswfBasis, n: int, j: int) -> float:
    """``int y^j psi_n = sum_k a_jk beta_k^n`` (moments of the Legendre basis)."""
    a = legendre_moments(j)
    row = basis.beta[n, : j + 1]
    return kernels.dot2(a[: row.size], row)


def check_moment_bounds(basis: PswfBasis, exponent: float = 1.0) -> BoundReport:
    """``0 <= (-1)^floor(n/2) int y^j psi_n <= q^(-exponent j) |mu_n|`` for
    ``q < 1`` and ``j(j+1) <= chi_n``, j of the parity of n.

    ``exponent=1`` is the stated bound; ``exponent=0.5`` is the sharper one
    that the derivative bound actually delivers. Moments come from the
    Legendre coefficients, independent of the derivative recurrence.
    """
    name = "moment_bound" if exponent == 1.0 else "moment_bound_q%g" % exponent
    r = _report(name, basis)
    c2 = basis.c ** 2
    for n in range(basis.n_max + 1):
        chi = float(basis.chi[n])
        q = c2 / chi
        if not q < 1:
            continue
        if basis.loss_flags[n]:
            r.skipped.append(n)
            continue
        mu = float(basis.mu_abs[n])
        sgn = _sign_adjust(n)
        j = n % 2
        while j * (j + 1) <= chi and j <= basis.k_max:
            mom = sgn * legendre_route_moment(basis, n, j)
            scale = mu * q ** (-exponent * j)
            # relative comparison keeps tiny |mu| cases meaningful
            r.record(n, j, -mom / mu, 0.0, slack=POSITIVITY_SLACK)
            r.record(n, j, mom / mu, scale / mu)
            j += 2
    return r


def check_value_at_one(basis: PswfBasis) -> BoundReport:
    """``|psi_n(1)| <= 2 chi_n^(1/4)``."""
    r = _report("value_at_one", basis)
    v = value_at_one(basis)
    for n in range(basis.n_max + 1):
        r.record(n, 0, abs(v[n]), 2.0 * float(basis.chi[n]) ** 0.25)
    return r


# -- lambda ---------------------------------------------------------------------------

def check_lambda_decay(basis: PswfBasis, slope_max: float = LAMBDA_SLOPE_MAX) -> BoundReport:
    """Ordering ``1 > lambda_0 > lambda_1 > ...`` (up to rounding), the trace
    bound ``sum lambda_n <= 2c/pi`` and a negative log-linear decay slope
    over ``n > 1.35 c``.

    The fitted slope is recorded as the case ``(n=-1, k=-1)``.
    """
    r = _report("lambda_decay", basis)
    lam = np.asarray(basis.lam, dtype=float)
    good = ~np.asarray(basis.loss_flags, dtype=bool)
    for n in range(basis.n_max + 1):
        if not good[n]:
            r.skipped.append(n)
            continue
        r.record(n, 0, np.finfo(float).tiny, lam[n], slack=0.0)
        r.record(n, 0, lam[n], 1.0)
        if n >= 1 and good[n - 1]:
            r.record(n, 1, lam[n], lam[n - 1], slack=SLACK_REL * lam[n - 1])
    trace = float(np.sum(lam[good][::-1]))
    r.record(-1, 2, trace, 2.0 * basis.c / math.pi + 1e-8, slack=0.0)
    ns = np.arange(basis.n_max + 1)
    sel = (ns > 1.35 * basis.c) & good & (lam > 0)
    if np.count_nonzero(sel) < 5 or basis.n_max <= 1.35 * basis.c + 4:
        r.inconclusive = True
        r.notes["slope"] = None
    else:
        slope = float(np.polyfit(ns[sel].astype(float), np.log(lam[sel]), 1)[0])
        r.notes["slope"] = slope
        r.record(-1, -1, slope, slope_max, slack=0.0)
    return r


# -- Fourier-PSWF coefficients ----------------------------------------------------------

def fourier_pswf_coefficient(basis: PswfBasis, n: int, k: int) -> complex:
    """``<exp(i k pi x), psi_n> = sum_m beta_m^n i^m sqrt(2/k) sqrt(m + 1/2) J_{m+1/2}(k pi)``.

    Written with half-integer Bessel functions; negative k uses
    ``J_{m+1/2}(-z) i^m = (-i)^m J_{m+1/2}(z)`` up to the common factor.
    k = 0 gives ``int psi_n = sqrt 2 beta_0^n``.
    """
    if not 0 <= n <= basis.n_max:
        raise IndexError("index %d outside 0..%d" % (n, basis.n_max))
    if k == 0:
        return complex(math.sqrt(2.0) * basis.beta[n, 0])
    z = math.pi * abs(k)
    width = basis.beta.shape[1]
    J = bessel_half_integer_seq(width - 1, z)
    ms = np.arange(width)
    weights = np.sqrt(2.0 / abs(k)) * np.sqrt(ms + 0.5) * J
    # i^m = i^n (-1)^((m - n)/2) on the parity of n
    sign = np.where(((ms - n) // 2) % 2 == 0, 1.0, -1.0)
    real = kernels.dot2(basis.beta[n] * sign, weights)
    if k < 0 and n % 2:
        real = -real
    return complex(real) * (1j) ** (n % 4)


def check_fourier_decay(basis: PswfBasis, M: float = math.sqrt(2.0)) -> BoundReport:
    """Envelope ``max_{|k| <= n/M} |<exp(i k pi x), psi_n>|`` for ``n >= max(cM, 3)``.

    The fitted log-linear slope of the envelope must be negative; it is
    recorded as the case ``(n=-1, k=-1)`` and the per-n maxima in
    ``notes["envelope"]``.
    """
    if M < math.sqrt(2.0):
        raise ValueError("M must be at least sqrt(2)")
    n0 = int(math.ceil(max(basis.c * M, 3.0)))
    if basis.n_max < n0 + 8:
        raise ValueError("basis n_max = %d too small; need at least %d" % (basis.n_max, n0 + 8))
    r = _report("fourier_decay", basis)
    env = {}
    for n in range(n0, basis.n_max + 1):
        kk = int(math.floor(n / M))
        vals = [abs(fourier_pswf_coefficient(basis, n, k)) for k in range(-kk, kk + 1)]
        env[n] = max(vals)
    r.notes["envelope"] = env
    ns = np.array(sorted(env), dtype=float)
    ys = np.array([env[int(n)] for n in ns])
    ok = ys > 0
    if np.count_nonzero(ok) < 5:
        r.inconclusive = True
        r.notes["slope"] = None
        return r
    slope = float(np.polyfit(ns[ok], np.log(ys[ok]), 1)[0])
    r.notes["slope"] = slope
    r.record(-1, -1, slope, 0.0, slack=0.0)
    return r


# -- suite ---------------------------------------------------------------------------

def run_all(basis: PswfBasis, fourier: bool = True):
    """All checks on one basis; returns a list of BoundReports."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        reports = [
            check_chi_bounds(basis),
            check_beta_structure(basis),
            check_derivative_bound(basis),
            check_moment_bounds(basis),
            check_value_at_one(basis),
            check_value_bound(basis),
            check_lambda_decay(basis),
        ]
    if basis.c >= 1.0 / math.sqrt(2.0):
        try:
            reports.append(admissible_range_witness(basis))
        except ValueError:
            pass
    if fourier:
        try:
            reports.append(check_fourier_decay(basis))
        except ValueError:
            pass
    return reports


def acceptance_n_max(c: float) -> int:
    return int(math.ceil(1.5 * c)) + 30
