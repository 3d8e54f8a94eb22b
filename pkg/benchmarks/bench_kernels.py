"""Compare the compiled kernels with the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``. Each row
reports the best-of-R wall time per call for both backends, their ratio,
and whether the two results are bit-identical.
"""
import argparse
import sys
import timeit

import numpy as np

from prolate import _pykernels
from prolate.eigensystem import build_tridiagonal


def cases():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(20000)
    b = rng.standard_normal(20000)
    A = rng.standard_normal((64, 400))
    B = rng.standard_normal((400, 101))
    x = np.linspace(-1, 1, 201)
    T = build_tridiagonal(100.0, "even", 160)
    d, e = np.array(T.diagonal), np.array(T.offdiagonal)
    return [
        ("dot2 n=20000", "dot2", (a, b)),
        ("dd_dot n=20000", "dd_dot", (a, b)),
        ("dot2_matmul 64x400x101", "dot2_matmul", (A, B)),
        ("legendre_table k=400 x=201", "legendre_table", (400, x)),
        ("sph_bessel_table m=300 x=201", "sph_bessel_table", (300, 50.0 * np.abs(x) + 0.1)),
        ("gauss_legendre_newton m=512", "gauss_legendre_newton", (512,)),
        ("tql2 K=160", "tql2", (d, e, True)),
        ("bisect_eigenvalues K=160 count=40", "bisect_eigenvalues", (d, e, 40)),
    ]


def same(u, v):
    if isinstance(u, tuple):
        return all(same(p, q) for p, q in zip(u, v))
    return np.array_equal(np.asarray(u), np.asarray(v))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    try:
        from prolate import _kernels
    except ImportError:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    print("%-36s %12s %12s %8s %s" % ("kernel", "compiled_s", "python_s", "speedup", "identical"))
    for label, name, argtuple in cases():
        fc = getattr(_kernels, name)
        fp = getattr(_pykernels, name)
        n = 1 if name in ("tql2", "gauss_legendre_newton", "bisect_eigenvalues") else 3
        tc = min(timeit.repeat(lambda: fc(*argtuple), number=n, repeat=args.repeat)) / n
        tp = min(timeit.repeat(lambda: fp(*argtuple), number=n, repeat=args.repeat)) / n
        print("%-36s %12.3e %12.3e %8.1f %s" % (label, tc, tp, tp / tc, same(fc(*argtuple), fp(*argtuple))))
    return 0


if __name__ == "__main__":
    sys.exit(main())
