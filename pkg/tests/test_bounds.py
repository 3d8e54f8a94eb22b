import math

import numpy as np
import pytest

from prolate.bounds import (
    BoundReport,
    acceptance_n_max,
    check_beta_structure,
    check_chi_bounds,
    check_derivative_bound,
    check_fourier_decay,
    check_lambda_decay,
    check_moment_bounds,
    check_value_at_one,
    check_value_bound,
    fourier_pswf_coefficient,
    beta_sign_range,
    admissible_range_witness,
    run_all,
)
from prolate.pswf import build_basis, finite_fourier_value, psi_matrix
from prolate.specfun import gauss_legendre


def test_report_bookkeeping():
    r = BoundReport("demo", 1.0, 5)
    r.record(2, 1, 0.5, 1.0)
    r.record(3, 0, 2.0, 1.0)
    r.record(1, 4, 1.0 + 1e-13, 1.0)
    assert not r.ok
    assert r.violations == [(3, 0, 2.0, 1.0)]
    assert r.worst_margin == -1.0
    assert r.n_range == (1, 3) and r.k_range == (0, 4)
    lines = r.to_text().splitlines()
    assert lines[0].startswith("# bound=demo c=1 n_max=5 cases=3")
    assert lines[1] == "name,n,k,lhs,rhs,margin"
    assert lines[2] == "demo,3,0,2.00000000e+00,1.00000000e+00,-1.00000000e+00"


def test_chi_bounds_examples(get_basis):
    tiny = build_basis(1e-8, 10)
    r = check_chi_bounds(tiny)
    assert r.ok and abs(r.worst_margin) < 1e-12
    r = check_chi_bounds(get_basis(10.0, 40))
    assert r.ok
    b = get_basis(10.0, 40)
    sharp = [n for n in range(41) if b.q[n] <= 1]
    assert all((math.pi * (n + 1) / 2) ** 2 > b.chi[n] for n in sharp)


def test_beta_structure_examples(get_basis):
    b = get_basis(5.0, 40)
    assert abs(b.beta[20, 0]) <= b.mu_abs[20] / math.sqrt(2)
    assert np.all(b.beta[0::2, 1::2] == 0) and np.all(b.beta[1::2, 0::2] == 0)
    b10 = get_basis(10.0, 45)
    row = b10.beta[30] * (1 if (30 // 2) % 2 == 0 else -1)
    kk = int(30 / math.sqrt(2))
    ev = row[0:kk + 1:2]
    assert np.all(np.diff(ev) >= -1e-13)
    assert check_beta_structure(b10).ok


def test_beta_sign_range(get_basis):
    b = get_basis(10.0, 40)
    for n in (20, 30, 40):
        k = beta_sign_range(b, n)
        assert k * (k - 1) + 1.13 * 100 <= b.chi[n] < (k + 1) * k + 1.13 * 100
    assert beta_sign_range(b, 0) == -1


def test_admissible_range_witness(get_basis):
    assert admissible_range_witness(get_basis(10.0, 45)).ok
    with pytest.raises(ValueError):
        admissible_range_witness(get_basis(10.0, 45), A=2.0, B=2.0)


def test_derivative_value_and_moment_bounds(get_basis):
    b = get_basis(10.0, 45)
    for chk in (check_derivative_bound, check_value_bound, check_value_at_one):
        r = chk(b)
        assert r.ok and r.cases > 0
    assert check_moment_bounds(b).ok
    assert check_moment_bounds(b, exponent=0.5).ok


def test_moment_routes_agree(get_basis):
    from prolate.bounds import legendre_route_moment
    from prolate.pswf import moment
    b = get_basis(10.0, 45)
    for n, j in ((20, 0), (20, 4), (31, 5), (40, 10)):
        assert legendre_route_moment(b, n, j) == pytest.approx(moment(b, n, j), rel=1e-9, abs=1e-15)


def test_lambda_decay_examples(get_basis):
    r = check_lambda_decay(build_basis(1.0, 12))
    assert r.ok
    r = check_lambda_decay(get_basis(10.0, 30))
    assert r.ok and r.notes["slope"] <= -0.1
    r = check_lambda_decay(build_basis(10.0, 15))
    assert r.inconclusive and r.ok


def test_fourier_coefficient_routes(get_basis):
    b = get_basis(1.0, 48)
    rule = gauss_legendre(2000)
    P = psi_matrix(b, rule.nodes)
    for n, k in ((0, 1), (3, 2), (10, -3), (20, 2), (40, 1), (7, 5)):
        v = fourier_pswf_coefficient(b, n, k)
        ref = np.sum(rule.weights * np.exp(1j * k * math.pi * rule.nodes) * P[n])
        assert abs(v - ref) < 1e-10
        if not b.loss_flags[n]:
            assert abs(v - finite_fourier_value(b, n, k * math.pi / b.c)) < 1e-10
        if n % 2:
            assert v.real == 0
    assert fourier_pswf_coefficient(b, 6, 0) == pytest.approx(math.sqrt(2) * b.beta[6, 0])
    assert abs(fourier_pswf_coefficient(b, 20, 2)) < 1e-6
    assert abs(fourier_pswf_coefficient(b, 40, 1)) < 1e-10


def test_fourier_decay(get_basis):
    r = check_fourier_decay(get_basis(1.0, 40))
    assert r.ok and r.notes["slope"] < 0
    with pytest.raises(ValueError):
        check_fourier_decay(get_basis(1.0, 40), M=1.0)
    with pytest.raises(ValueError):
        check_fourier_decay(build_basis(10.0, 20))


@pytest.mark.parametrize("c", [1.0, 5.0, 10.0])
def test_suite_clean_small(get_basis, c):
    b = get_basis(c, acceptance_n_max(c))
    for r in run_all(b):
        assert r.ok, r.to_text()


def test_acceptance_n_max():
    assert acceptance_n_max(1.0) == 32
    assert acceptance_n_max(100.0) == 180
