"""Acceptance criteria, each at its stated tolerance.

Every test records one ``PASS``/``FAIL`` line (printed in the terminal
summary) followed by indented diagnostics. A criterion that cannot be met
fails here; the diagnostics say why.
"""
import io
import math
import time
import warnings
from contextlib import redirect_stdout

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from prolate.approx import (
    TABLE_N,
    TABLE_S,
    coeff_closed_form_exponential,
    coeff_fourier,
    coeff_quadrature,
    fit_rate,
    legendre_tail_error,
    pswf_tail_error,
    weierstrass_table,
)
from prolate.bounds import (
    acceptance_n_max,
    check_fourier_decay,
    check_lambda_decay,
    run_all,
)
from prolate.cli import main
from prolate.eigensystem import build_tridiagonal, pswf_spectrum
from prolate.functions import Exponential, RandomSeries
from prolate.oracle import nystrom_lambda
from prolate.pswf import build_basis, load_basis, psi_matrix, save_basis
from prolate.specfun import gauss_legendre

FIXTURE_C = (1.0, 5.0, 10.0, 50.0, 100.0)

# reference E_N(s), rows N = 20..100, columns s = 0.75..2.0
REFERENCE_TABLE = {
    20: (4.57329e-01, 4.66173e-01, 4.85990e-01, 5.05973e-01, 5.23232e-01, 5.37227e-01),
    30: (3.15869e-01, 3.11677e-01, 3.28241e-01, 3.48562e-01, 3.67260e-01, 3.82963e-01),
    40: (1.06843e-01, 1.52009e-01, 1.91237e-01, 2.20969e-01, 2.43432e-01, 2.60523e-01),
    50: (4.09844e-02, 6.88472e-02, 1.01827e-01, 1.26518e-01, 1.44809e-01, 1.58520e-01),
    60: (3.30178e-02, 2.09084e-02, 3.25551e-02, 4.28999e-02, 5.06959e-02, 5.65531e-02),
    70: (3.15097e-02, 8.82446e-03, 2.51157e-03, 7.35725e-04, 2.33066e-04, 1.04137e-04),
    80: (3.01566e-02, 8.55598e-03, 2.40312e-03, 6.87458e-04, 1.98993e-04, 5.80481e-05),
    90: (2.67972e-02, 7.64167e-03, 2.14661e-03, 6.15062e-04, 1.78461e-04, 5.22848e-05),
    100: (2.39141e-02, 6.72825e-03, 1.82818e-03, 5.10057e-04, 1.45036e-04, 4.19238e-05),
}


def report(num, title, ok, details):
    ACCEPTANCE_LINES.append("criterion %d %s: %s" % (num, "PASS" if ok else "FAIL", title))
    for d in details:
        ACCEPTANCE_LINES.append("criterion %d     %s" % (num, d))
    print("criterion %d %s: %s" % (num, "PASS" if ok else "FAIL", title))
    for d in details:
        print("    " + d)


def basis_for(c):
    return build_basis(c, acceptance_n_max(c))


def test_criterion_1_exponential_tail_golden_numbers():
    t0 = time.perf_counter()
    leg = legendre_tail_error(50.0, 50)
    b = build_basis(50.0, 140)
    ps = pswf_tail_error(50.0, b, 50)
    elapsed = time.perf_counter() - t0
    leg_ok = abs(leg / 3.087858e-1 - 1) <= 1e-6
    ps_ok = abs(ps / 1.356604e-8 - 1) <= 0.05
    flagged = [n for n in range(51, b.n_max + 1) if b.loss_flags[n]]
    ok = leg_ok and ps_ok and elapsed < 10
    details = [
        "exp(50 i x), c = 50, partial sums over n <= 50 (tail n >= 51):",
        "Legendre %.10e (target 3.087858e-01, rel err %.2e)" % (leg, leg / 3.087858e-1 - 1),
        "PSWF     %.10e (target 1.356604e-08, rel err %.2e)" % (ps, ps / 1.356604e-8 - 1),
        "loss-of-significance flags among dropped terms: %d; runtime %.2f s" % (len(flagged), elapsed),
        "other readings of the tail (independent 60-digit check agrees to 4e-7):",
        "  Legendre exp tail from n=50: %.10e, from n=49: %.10e"
        % (legendre_tail_error(50.0, 50, 50), legendre_tail_error(50.0, 50, 49)),
        "  Legendre cos tail from n=50: %.10e  <- matches the reference"
        % legendre_tail_error(50.0, 50, 50, real_part=True),
        "  PSWF exp tail from n=49: %.10e  <- matches the reference" % pswf_tail_error(50.0, b, 50, 49),
        "  PSWF exp tail from n=50: %.10e" % pswf_tail_error(50.0, b, 50, 50),
        "  PSWF cos tail from n=50: %.10e" % pswf_tail_error(50.0, b, 50, 50, real_part=True),
        "no single convention reproduces both reference figures",
    ]
    report(1, "exponential tail golden numbers", ok, details)
    assert ok


def test_criterion_2_weierstrass_error_table():
    t0 = time.perf_counter()
    b = build_basis(100.0, 101)
    table = weierstrass_table(b, TABLE_N, TABLE_S, inclusive=True)
    elapsed = time.perf_counter() - t0
    bad = []
    for N in TABLE_N:
        for j, s in enumerate(TABLE_S):
            ref = REFERENCE_TABLE[N][j]
            got = table[(N, s)]
            if ref >= 1e-3:
                fine = abs(got / ref - 1) <= 0.05
            else:
                fine = 0.5 <= got / ref <= 2.0
            if not fine:
                bad.append((N, s, got, ref))
    ok = not bad and elapsed < 120
    details = ["c = 100, grid metric on k/50, partial sums over n <= N; runtime %.2f s" % elapsed,
               "%d of %d entries outside tolerance:" % (len(bad), len(TABLE_N) * len(TABLE_S))]
    details += ["  N=%d s=%g: got %.5e, reference %.5e (%+.1f%%)" % (N, s, g, r, 100 * (g / r - 1))
                for N, s, g, r in bad]
    details.append("misses cluster at the plunge (N = 50, 60) and at N = 100 for rough s;")
    details.append("sums over n < N miss 36 entries, so the reference route is not recoverable")
    report(2, "Weierstrass error table", ok, details)
    assert ok


def test_criterion_3_oracle_equivalence():
    details = []
    ok = True
    for c in (1.0, 5.0, 10.0, 50.0):
        b = basis_for(c)
        keep = np.flatnonzero(b.lam > 1e-12)
        n = int(keep[-1]) + 1
        m = int(math.ceil(4 * (n + c)))
        r = nystrom_lambda(c, m, n, kernel="fourier")
        lam_err = float(np.max(np.abs(r.lam[keep] / b.lam[keep] - 1)))
        chi_err = 0.0
        for sl in pswf_spectrum(c, b.n_max):
            T = build_tridiagonal(c, sl.parity, 4 * sl.truncation_K)
            w = np.linalg.eigvalsh(T.dense())[: sl.chi.size]
            chi_err = max(chi_err, float(np.max(np.abs(w / sl.chi - 1))))
        ok &= lam_err <= 1e-9 and chi_err <= 1e-11
        details.append("c=%g: %d lambdas > 1e-12, max rel err %.2e; chi vs 4K dense LAPACK %.2e"
                       % (c, keep.size, lam_err, chi_err))
    report(3, "oracle equivalence", ok, details)
    assert ok


def test_criterion_4_inequality_suite():
    details = []
    ok = True
    for c in FIXTURE_C:
        b = basis_for(c)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            reports = run_all(b, fourier=False)
        bad = [r for r in reports if not r.ok]
        ok &= not bad
        details.append("c=%g n_max=%d: %d reports, %d cases, violations %d"
                       % (c, b.n_max, len(reports), sum(r.cases for r in reports),
                          sum(len(r.violations) for r in reports)))
        for r in bad:
            details.append(r.to_text().strip())
    report(4, "inequality suite", ok, details)
    assert ok


def test_criterion_5_eigen_residuals():
    details = []
    ok = True
    for c in FIXTURE_C:
        worst = 0.0
        for sl in pswf_spectrum(c, acceptance_n_max(c)):
            T = sl.system
            for i in range(sl.chi.size):
                r = T.matvec(sl.beta[i]) - sl.chi[i] * sl.beta[i]
                worst = max(worst, float(np.max(np.abs(r[:-1]))) / (1 + sl.chi[i]))
        b = basis_for(c)
        rule = gauss_legendre(int(math.ceil(4 * (b.n_max + c))))
        P = psi_matrix(b, rule.nodes)
        x = np.linspace(-1, 1, 40)
        E = np.exp(1j * c * np.outer(x, rule.nodes)) * rule.weights
        resid = np.abs(E @ P.T - psi_matrix(b, x).T * b.mu) / (1 + b.mu_abs)
        integral = float(np.max(resid))
        ok &= worst <= 1e-11 and integral <= 1e-9
        details.append("c=%g: recurrence %.2e (limit 1e-11), integral relation %.2e (limit 1e-9)"
                       % (c, worst, integral))
    b = build_basis(10.0, 40)
    rule = gauss_legendre(400)
    P = psi_matrix(b, rule.nodes)
    orth = float(np.max(np.abs((P * rule.weights) @ P.T - np.eye(41))))
    ok &= orth <= 1e-10
    details.append("c=10 orthonormality n, m <= 40: %.2e (limit 1e-10)" % orth)
    report(5, "eigenrelation residuals", ok, details)
    assert ok


def test_criterion_6_rate_behaviour():
    b = build_basis(100.0, 101)
    Ns = (70, 80, 90, 100)
    table = weierstrass_table(b, Ns, (1.0, 1.5, 2.0), inclusive=True)
    details = []
    ok = True
    for s in (1.0, 1.5, 2.0):
        slope = fit_rate(Ns, [table[(N, s)] for N in Ns])
        pub = fit_rate(Ns, [REFERENCE_TABLE[N][TABLE_S.index(s)] for N in Ns])
        fine = abs(slope + s) <= 0.35
        ok &= fine
        details.append("s=%g: fitted exponent %.3f (need %.2f..%.2f) %s; reference table gives %.3f"
                       % (s, slope, -s - 0.35, -s + 0.35, "ok" if fine else "MISS", pub))
    for c in FIXTURE_C:
        r = check_lambda_decay(basis_for(c))
        slope = r.notes["slope"]
        fine = slope is not None and slope <= -0.1
        ok &= fine
        details.append("lambda_n slope over n > 1.35c at c=%g: %.3f" % (c, slope))
    r = check_fourier_decay(build_basis(1.0, 40))
    fine = r.notes["slope"] < 0
    ok &= fine
    details.append("Fourier-PSWF envelope slope, c=1, M=sqrt 2, n<=40: %.4f" % r.notes["slope"])
    details.append("past the plunge with c fixed the error tracks the band part, not N^-s;")
    details.append("the reference values themselves fit to exponents outside the window for s=1.5, 2")
    report(6, "rate behaviour", ok, details)
    assert ok


def test_criterion_7_route_agreement():
    details = []
    b50 = build_basis(50.0, 140)
    q = coeff_quadrature(Exponential(50.0), b50, 141, 512).values
    cf = coeff_closed_form_exponential(50.0, b50, 141).values
    d_exp = float(np.max(np.abs(q - cf)))
    details.append("f_lambda (lambda=50, c=50), quadrature m=512 vs closed form, n<=140: %.2e" % d_exp)
    b100 = build_basis(100.0, acceptance_n_max(100.0))
    f = RandomSeries(1.0, seed=1, term_count=4096)
    n = b100.n_max + 1
    four = coeff_fourier(f, b100, n, 4096).values
    quad = coeff_quadrature(f, b100, n, 4096).values
    d_b1 = float(np.max(np.abs(four - quad)))
    details.append("B_1 (seed 1, 4096 terms, c=100), Fourier K=4096 vs quadrature m=4096: %.2e" % d_b1)
    fine = coeff_quadrature(f, b100, n, 16384).values
    details.append("  same with quadrature m=16384: %.2e (the m=4096 rule aliases cos(4096 pi x))"
                   % float(np.max(np.abs(four - fine))))
    details.append("f_lambda has no Fourier route (50/pi is not an integer); B_1 has no separate")
    details.append("closed form (its cosine sum is the Fourier route), so each fixture has two routes")
    ok = d_exp <= 1e-8 and d_b1 <= 1e-8
    report(7, "route agreement", ok, details)
    assert ok


def _cli_output(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    assert code == 0
    return buf.getvalue()


def test_criterion_8_determinism(tmp_path, monkeypatch):
    monkeypatch.delenv("PROLATE_CACHE_DIR", raising=False)
    t1 = _cli_output(["table1"])
    t2 = _cli_output(["table1"])
    s1 = _cli_output(["spectrum", "--c", "50", "--n-max", "60"])
    s2 = _cli_output(["spectrum", "--c", "50", "--n-max", "60"])
    b = build_basis(50.0, 60)
    save_basis(b, tmp_path / "b.npz")
    r = load_basis(tmp_path / "b.npz")
    exact = all(getattr(r, k).tobytes() == getattr(b, k).tobytes()
                for k in ("chi", "beta", "mu_abs", "lam", "psi0", "mu_rel_err", "loss_flags"))
    exact &= r.c == b.c and r.n_max == b.n_max
    ok = t1 == t2 and s1 == s2 and exact
    report(8, "determinism", ok, ["table1 identical: %s, spectrum identical: %s, cache bit-exact: %s"
                                  % (t1 == t2, s1 == s2, exact)])
    assert ok
