"""Legendre-Galerkin eigensystem for the prolate differential operator.

Writing ``psi_n = sum_k beta_k Pbar_k`` turns the prolate differential
equation into a symmetric pentadiagonal problem that splits by parity of k
into two symmetric tridiagonal blocks. Block index j stands for degree
``k = 2j`` (even block) or ``k = 2j + 1`` (odd block).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from prolate._backend import ConvergenceError, kernels
from prolate.specfun import legendre_derivatives_at_zero, legendre_values_at_zero

TAIL_MASS_TOL = 1e-24
TAIL_WINDOW = 10
K_CAP = 16384

__all__ = [
    "ConvergenceError",
    "TruncationError",
    "TridiagonalSystem",
    "SpectrumSlice",
    "build_tridiagonal",
    "eigh_tridiagonal",
    "pswf_spectrum",
    "initial_truncation",
]


class TruncationError(RuntimeError):
    """The coefficient tail could not be made small enough below ``K_CAP``."""


def _parity_offset(parity) -> int:
    if parity in ("even", 0):
        return 0
    if parity in ("odd", 1):
        return 1
    raise ValueError("parity must be 'even' or 'odd', got %r" % (parity,))


def _parity_name(p: int) -> str:
    return "even" if p == 0 else "odd"


@dataclass(frozen=True)
class TridiagonalSystem:
    diagonal: np.ndarray
    offdiagonal: np.ndarray
    parity: str
    bandwidth_c: float
    truncation_K: int

    @property
    def degrees(self) -> np.ndarray:
        """Legendre degree k of each block index."""
        return 2 * np.arange(self.truncation_K) + _parity_offset(self.parity)

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.offdiagonal, 1)
                + np.diag(self.offdiagonal, -1))

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diagonal * v
        out[:-1] += self.offdiagonal * v[1:]
        out[1:] += self.offdiagonal * v[:-1]
        return out


@dataclass(frozen=True)
class SpectrumSlice:
    """Eigenpairs of one parity block.

    Row i of ``beta`` holds the block coefficients (degrees ``2i + parity``
    spacing 2) of the i-th eigenfunction of that parity, i.e. of
    ``psi_{2i + parity}``.
    """

    chi: np.ndarray
    beta: np.ndarray
    parity: str
    system: TridiagonalSystem

    @property
    def truncation_K(self) -> int:
        return self.system.truncation_K

    @property
    def indices(self) -> np.ndarray:
        """Global PSWF index n of each row."""
        return 2 * np.arange(self.chi.size) + _parity_offset(self.parity)

    def tail_mass(self) -> np.ndarray:
        return np.sum(self.beta[:, -TAIL_WINDOW:] ** 2, axis=1)

    def full_rows(self, width: int | None = None) -> np.ndarray:
        """Rows indexed by degree k, zeros at degrees of the other parity."""
        p = _parity_offset(self.parity)
        K = self.truncation_K
        if width is None:
            width = 2 * K - 1 + p
        out = np.zeros((self.chi.size, width))
        ks = 2 * np.arange(K) + p
        keep = ks < width
        out[:, ks[keep]] = self.beta[:, keep]
        return out


def build_tridiagonal(c: float, parity, K: int) -> TridiagonalSystem:
    """Leading K x K block of the parity-restricted eigensystem."""
    c = float(c)
    if not c > 0:
        raise ValueError("bandwidth c must be positive, got %r" % (c,))
    if K < 4:
        raise ValueError("truncation K must be at least 4, got %r" % (K,))
    p = _parity_offset(parity)
    k = (2 * np.arange(K) + p).astype(float)
    c2 = c * c
    diag = k * (k + 1) + c2 * (2 * k * (k + 1) - 1) / ((2 * k + 3) * (2 * k - 1))
    kk = k[:-1]
    off = c2 * (kk + 1) * (kk + 2) / ((2 * kk + 3) * np.sqrt((2 * kk + 5) * (2 * kk + 1)))
    diag.setflags(write=False)
    off.setflags(write=False)
    return TridiagonalSystem(diag, off, _parity_name(p), c, int(K))


def eigh_tridiagonal(T: TridiagonalSystem, method: str = "ql", count: int | None = None):
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    ``method="ql"`` runs implicit QL with Wilkinson shifts on the whole
    block; ``method="bisect"`` finds the ``count`` smallest eigenvalues by
    Sturm bisection and their vectors by inverse iteration.
    """
    if method == "ql":
        w, V = kernels.tql2(T.diagonal, T.offdiagonal, True)
        if count is not None:
            w, V = w[:count], V[:, :count]
        return np.asarray(w, dtype=float), V
    if method == "bisect":
        n = T.truncation_K if count is None else int(count)
        w = kernels.bisect_eigenvalues(T.diagonal, T.offdiagonal, n)
        V = np.empty((T.truncation_K, n))
        for i in range(n):
            V[:, i] = kernels.inverse_iteration(T.diagonal, T.offdiagonal, w[i])
        return w, V
    raise ValueError("unknown eigensolver method %r" % (method,))


def initial_truncation(c: float, n_max: int) -> int:
    return n_max // 2 + int(math.ceil(c)) + 32


def _fix_signs(V: np.ndarray, p: int) -> np.ndarray:
    K = V.shape[0]
    ks = 2 * np.arange(K) + p
    if p == 0:
        ref = legendre_values_at_zero(int(ks[-1]))[ks]
    else:
        ref = legendre_derivatives_at_zero(int(ks[-1]))[ks]
    out = V.copy()
    for i in range(V.shape[1]):
        s = kernels.dot2(ref, V[:, i])
        if s < 0:
            out[:, i] = -V[:, i]
    return out


def _solve_block(c, p, count, n_max, method, refine, K=None):
    K = initial_truncation(c, n_max) if K is None else int(K)
    K = max(K, count + TAIL_WINDOW, 4)
    while True:
        T = build_tridiagonal(c, p, K)
        m = method
        if m == "auto":
            m = "bisect" if (n_max <= 8 and K > 512) else "ql"
        w, V = eigh_tridiagonal(T, m, count)
        tail = np.sum(V[-TAIL_WINDOW:, :] ** 2, axis=0)
        if np.all(tail <= TAIL_MASS_TOL):
            break
        if K >= K_CAP:
            raise TruncationError(
                "tail mass %.3e exceeds %.0e at K = %d for c = %r"
                % (float(np.max(tail)), TAIL_MASS_TOL, K, c))
        K = min(2 * K, K_CAP)
    if refine:
        for i in range(count):
            V[:, i] = kernels.refine_head(T.diagonal, T.offdiagonal, w[i], V[:, i])
    V = _fix_signs(V, p)
    beta = np.ascontiguousarray(V.T)
    chi = np.array(w, dtype=float)
    chi.setflags(write=False)
    beta.setflags(write=False)
    return SpectrumSlice(chi, beta, _parity_name(p), T)


def pswf_spectrum(c: float, n_max: int, method: str = "auto", refine: bool = True,
                  K: int | None = None):
    """Spectra of both parity blocks for PSWF indices 0..n_max.

    Returns ``(even, odd)`` SpectrumSlices. The truncation starts at
    ``n_max/2 + ceil(c) + 32`` (or ``K``) and doubles until the squared
    mass of the last ten coefficients of every retained row is at most
    1e-24. With ``refine`` the tiny leading coefficients of each vector are
    recomputed from the recurrence so they carry relative accuracy.
    """
    c = float(c)
    if not c > 0:
        raise ValueError("bandwidth c must be positive, got %r" % (c,))
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    n_even = n_max // 2 + 1
    n_odd = (n_max + 1) // 2
    even = _solve_block(c, 0, n_even, n_max, method, refine, K)
    if n_odd:
        odd = _solve_block(c, 1, n_odd, n_max, method, refine, K)
    else:
        T = build_tridiagonal(c, 1, max(4, initial_truncation(c, n_max) if K is None else K))
        odd = SpectrumSlice(np.zeros(0), np.zeros((0, T.truncation_K)), "odd", T)
    return even, odd
