import math

import numpy as np
import pytest
from scipy.special import spherical_jn

from prolate.oracle import nystrom_lambda, quadrature_inner_product, sinc_nystrom_matrix
from prolate.pswf import psi_matrix
from prolate.specfun import legendre_table


def _pbar(k, x):
    return legendre_table(k, x)[k]


def test_small_c_trace():
    c = 0.1
    r = nystrom_lambda(c, 64, 15)
    assert abs(r.lam.sum() - 2 * c / math.pi) < 1e-12
    assert r.lam[0] == pytest.approx(2 * c / math.pi, rel=1e-2)
    A, x, w = sinc_nystrom_matrix(c, 64)
    assert np.trace(A) == pytest.approx(2 * c / math.pi, rel=1e-14)


def test_matrix_symmetric():
    A, _, _ = sinc_nystrom_matrix(7.0, 128)
    assert np.array_equal(A, A.T)


@pytest.mark.parametrize("kernel", ["sinc", "fourier"])
def test_agrees_with_basis_c5(get_basis, kernel):
    b = get_basis(5.0, 20)
    r = nystrom_lambda(5.0, 256, 21, kernel=kernel)
    keep = b.lam > 1e-12
    assert np.allclose(r.lam[keep], b.lam[keep], rtol=1e-10, atol=0 if kernel == "fourier" else 1e-16)


def test_fourier_kernel_reaches_deep(get_basis):
    b = get_basis(10.0, 21)
    r = nystrom_lambda(10.0, 256, 22, kernel="fourier")
    keep = b.lam > 1e-12
    assert np.max(np.abs(r.lam[keep] / b.lam[keep] - 1)) < 1e-9


def test_psi_samples_match_basis(get_basis):
    b = get_basis(5.0, 20)
    r = nystrom_lambda(5.0, 256, 10, kernel="fourier")
    P = psi_matrix(b, r.nodes, range(10))
    assert np.max(np.abs(r.psi_samples - P)) < 1e-10
    # sinc-kernel eigenvectors lose accuracy like eps / lambda_n
    r = nystrom_lambda(5.0, 256, 10, kernel="sinc")
    err = np.max(np.abs(r.psi_samples - P), axis=1)
    assert np.all(err <= 1e-14 / r.lam + 1e-13)


def test_refinement_converges():
    a = nystrom_lambda(5.0, 128, 12, kernel="fourier")
    b = nystrom_lambda(5.0, 256, 12, kernel="fourier")
    keep = a.lam > 1e-12
    assert np.max(np.abs(a.lam[keep] / b.lam[keep] - 1)) < 1e-11


def test_deterministic():
    a = nystrom_lambda(3.0, 96, 8)
    b = nystrom_lambda(3.0, 96, 8)
    assert np.array_equal(a.lam, b.lam) and np.array_equal(a.psi_samples, b.psi_samples)


def test_size_and_kernel_errors():
    with pytest.raises(ValueError):
        nystrom_lambda(5.0, 40, 10)
    with pytest.raises(ValueError):
        nystrom_lambda(5.0, 256, 10, kernel="gauss")
    with pytest.raises(ValueError):
        nystrom_lambda(-1.0, 256, 10)


def test_inner_product_examples(get_basis):
    p3 = lambda x: _pbar(3, x)
    v, err = quadrature_inner_product(p3, p3, 32)
    assert abs(v - 1) < 1e-14
    b = get_basis(10.0, 21)
    m = int(4 * (21 + 10))
    for n, k in ((0, 0), (3, 3), (2, 4), (5, 7)):
        v, _ = quadrature_inner_product(lambda x: b(n, x), lambda x: b(k, x), m)
        assert abs(v - (n == k)) < 1e-10


def test_inner_product_closed_form():
    # <exp(i pi x), Pbar_2> = i^2 sqrt(2 pi / pi) sqrt(5/2) J_{5/2}(pi)
    #                       = i^2 2 sqrt(5/2) j_2(pi)
    v, err = quadrature_inner_product(lambda x: np.exp(1j * math.pi * x),
                                      lambda x: _pbar(2, x), 64)
    ref = -2 * math.sqrt(2.5) * spherical_jn(2, math.pi)
    assert abs(v - ref) < 1e-14
    v2, _ = quadrature_inner_product(lambda x: np.exp(1j * math.pi * x),
                                     lambda x: _pbar(2, x), 128)
    assert abs(v2 - v) <= err


def test_inner_product_errors():
    with pytest.raises(ValueError, match="x ="):
        quadrature_inner_product(lambda x: np.where(x > 0.5, np.nan, x), lambda x: x, 32)
    with pytest.raises(ValueError):
        quadrature_inner_product(lambda x: x, lambda x: x, 8)
