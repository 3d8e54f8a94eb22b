"""Command-line front end: ``prolate <subcommand> [flags]``.

Output is CSV led by a ``# schema=1`` line (or JSON with ``--format json``);
floating-point values carry 9 significant digits. Usage errors exit with
status 2, failed runs with status 1.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time

import numpy as np

from prolate import __version__
from prolate.approx import (
    CSV_SCHEMA,
    SWEEP_HEADER,
    TABLE_N,
    TABLE_S,
    coefficients,
    legendre_tail_error,
    pswf_tail_error,
    sobolev_report,
    weierstrass_table,
)
from prolate.bounds import acceptance_n_max, check_moment_bounds, run_all
from prolate.eigensystem import TAIL_WINDOW
from prolate.functions import make_function
from prolate.pswf import cached_basis, evaluate_inside, evaluate_outside, plunge_index

CACHE_ENV = "PROLATE_CACHE_DIR"


class UsageError(Exception):
    pass


# -- parsing helpers ------------------------------------------------------------

_PI_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*$", re.I)


def parse_real(text: str) -> float:
    """A real number, or a multiple of pi written ``20pi``, ``0.5*pi`` or ``pi``."""
    m = _PI_RE.match(text)
    if m:
        factor = float(m.group(1)) if m.group(1) else 1.0
        return factor * math.pi
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not a number: %r" % text) from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("not a finite number: %r" % text)
    return v


def parse_list(conv):
    def parse(text: str):
        items = [t for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        return [conv(t.strip()) for t in items]
    return parse


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.8e" % float(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float("%.8e" % float(v))
    return v


def emit(args, header, rows, meta=None) -> str:
    """Render rows as CSV (default) or JSON and write to ``--out`` or stdout."""
    if args.format == "json":
        doc = {"schema": CSV_SCHEMA, "command": args.command}
        if meta:
            doc.update({k: _jsonable(v) for k, v in meta.items()})
        doc["columns"] = header
        doc["rows"] = [[_jsonable(v) for v in row] for row in rows]
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    else:
        lines = ["# schema=%d" % CSV_SCHEMA]
        if meta:
            lines.append("# " + " ".join("%s=%s" % (k, _meta(v)) for k, v in meta.items()))
        lines.append(",".join(header))
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    _write(args, text)
    return text


def _meta(v):
    if isinstance(v, float):
        return "%.9g" % v
    return str(v)


def _write(args, text):
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cache_dir(args):
    env = os.environ.get(CACHE_ENV)
    if env:
        return env
    return args.cache_dir


def basis_for(args, c, n_max):
    return cached_basis(c, n_max, cache_dir(args))


def _positive_c(c):
    if not c > 0:
        raise UsageError("--c must be positive, got %r" % c)
    return c


# -- subcommands ------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    c = _positive_c(args.c)
    if args.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    basis = basis_for(args, c, args.n_max)
    rows = []
    for n in range(args.n_max + 1):
        p = n % 2
        K = basis.K_even if p == 0 else basis.K_odd
        block = basis.beta[n, p::2][:K]
        tail = float(np.sum(block[-TAIL_WINDOW:] ** 2))
        rows.append((n, basis.chi[n], basis.lam[n], basis.mu_abs[n], tail, bool(basis.loss_flags[n])))
    emit(args, ["n", "chi", "lambda", "mu_abs", "beta_tail_mass", "loss_flag"], rows,
         {"c": c, "n_max": args.n_max, "plunge_index": plunge_index(basis)})
    return 0


def cmd_eval(args) -> int:
    c = _positive_c(args.c)
    ns = args.n
    n_max = max(args.n_max, max(ns))
    basis = basis_for(args, c, n_max)
    rows = []
    for n in ns:
        if n < 0:
            raise UsageError("indices must be non-negative")
        for x in args.x:
            if abs(x) <= 1.0:
                v = evaluate_inside(basis, n, x)
            else:
                v = evaluate_outside(basis, n, x)
            rows.append((n, x, v))
    emit(args, ["n", "x", "psi"], rows, {"c": c})
    return 0


def example1_n_max(c: float, lam: float, N: int) -> int:
    return int(max(N + 40, math.ceil(1.5 * max(c, abs(lam))) + 60))


def example1_errors(lam: float, c: float, N: int, tail_start: int | None = None,
                    real_part: bool = False, cache=None):
    """``(legendre_error, pswf_error, flagged)`` for ``exp(i lam x)``.

    Both partial sums keep the indices ``n < tail_start`` (default N + 1,
    i.e. the sum runs over ``n <= N``). With ``real_part`` the function is
    ``cos(lam x)``. ``flagged`` lists dropped indices whose ``|mu_n|`` is
    marked unreliable.
    """
    start = N + 1 if tail_start is None else tail_start
    leg = legendre_tail_error(lam, N, first_dropped=start, real_part=real_part)
    basis = cached_basis(c, example1_n_max(c, lam, N), cache)
    pswf = pswf_tail_error(lam, basis, N, first_dropped=start, real_part=real_part)
    flagged = [n for n in range(start, basis.n_max + 1) if basis.loss_flags[n]]
    return leg, pswf, flagged


def cmd_example1(args) -> int:
    c = _positive_c(args.c)
    if args.N < 0:
        raise UsageError("--N must be non-negative")
    start = args.tail_start if args.tail_start is not None else args.N + 1
    if start < 0:
        raise UsageError("--tail-start must be non-negative")
    leg, pswf, flagged = example1_errors(args.lam, c, args.N, start, args.real, cache_dir(args))
    emit(args, ["lambda", "c", "N", "tail_start", "legendre_error", "pswf_error", "flagged_terms"],
         [(args.lam, c, args.N, start, leg, pswf, len(flagged))],
         {"function": "cos" if args.real else "exp"})
    return 0


def cmd_table1(args) -> int:
    c = _positive_c(args.c)
    N_list = args.N or list(TABLE_N)
    s_list = args.s or list(TABLE_S)
    if min(N_list) < 0 or min(s_list) <= 0:
        raise UsageError("N must be non-negative and s positive")
    basis = basis_for(args, c, max(N_list) + 1)
    table = weierstrass_table(basis, N_list, s_list, inclusive=True)
    header = ["N"] + ["s=%.9g" % s for s in s_list]
    rows = [[N] + [table[(N, s)] for s in s_list] for N in N_list]
    emit(args, header, rows, {"c": c, "partial_sum": "n<=N", "metric": "grid101"})
    return 0


def cmd_approx(args) -> int:
    c = _positive_c(args.c)
    N_list = args.N or [20, 40, 60, 80, 100]
    params = {}
    if args.kind in ("weierstrass", "random_series"):
        params["s"] = args.s[0] if args.s else 1.0
    if args.kind == "random_series":
        params["seed"] = args.seed
    if args.kind == "exponential":
        params["lam"] = args.lam
    try:
        f = make_function(args.kind, **params)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    M = max(N_list) + (1 if args.inclusive else 0)
    basis = basis_for(args, c, max(M - 1, 0))
    coeffs = coefficients(f, basis, M, route=args.route, m=args.quad_order, K=args.fourier_K)
    reports = [sobolev_report(f, basis, N, coeffs=coeffs, inclusive=args.inclusive) for N in N_list]
    header = SWEEP_HEADER.split(",")
    rows = []
    for r in reports:
        rows.append((r.c, r.N, r.s, r.error_l2_grid, r.error_l2_quadrature, r.band_part, r.tail_part))
    emit(args, header, rows, {"kind": args.kind, "route": coeffs.method})
    return 0


def cmd_check(args) -> int:
    if not args.c:
        raise UsageError("--c needs at least one bandwidth")
    texts = []
    bad = 0
    for c in args.c:
        _positive_c(c)
        n_max = args.n_max if args.n_max is not None else acceptance_n_max(c)
        basis = basis_for(args, c, n_max)
        reports = run_all(basis) + [check_moment_bounds(basis, exponent=0.5)]
        for rep in reports:
            texts.append(rep.to_text())
            bad += len(rep.violations)
    text = "# schema=%d\n" % CSV_SCHEMA + "".join(texts)
    _write(args, text)
    if bad:
        where = args.out or "standard output"
        sys.stderr.write("prolate check: %d violation(s); report in %s\n" % (bad, where))
        return 1
    return 0


def cmd_oracle_compare(args) -> int:
    from prolate.oracle import nystrom_lambda

    c = _positive_c(args.c)
    n_count = args.n_max + 1
    m = args.quad_order or int(2 * math.ceil(2 * (n_count + c)))
    basis = basis_for(args, c, args.n_max)
    res = nystrom_lambda(c, m, n_count, kernel=args.kernel)
    rows = []
    for n in range(n_count):
        a, b = float(basis.lam[n]), float(res.lam[n])
        rel = abs(a - b) / abs(b) if b != 0 else math.inf
        rows.append((n, a, b, rel))
    emit(args, ["n", "lambda_basis", "lambda_oracle", "rel_diff"], rows,
         {"c": c, "m": m, "kernel": args.kernel})
    return 0


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--cache-dir", help="basis cache directory (overridden by $%s)" % CACHE_ENV)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = argparse.ArgumentParser(prog="prolate", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common], help="chi, lambda, |mu| per index")
    s.add_argument("--c", type=parse_real, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("eval", parents=[common], help="evaluate psi_n at points")
    s.add_argument("--c", type=parse_real, required=True)
    s.add_argument("--n", type=parse_list(int), required=True)
    s.add_argument("--x", type=parse_list(parse_real), required=True)
    s.add_argument("--n-max", type=int, default=0)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("example1", parents=[common], help="Legendre vs PSWF error for exp(i lam x)")
    s.add_argument("--lambda", dest="lam", type=parse_real, required=True)
    s.add_argument("--c", type=parse_real, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--tail-start", type=int, default=None,
                   help="first dropped index (default N + 1, i.e. the sum keeps n <= N)")
    s.add_argument("--real", action="store_true", help="use cos(lambda x) instead of exp(i lambda x)")
    s.set_defaults(func=cmd_example1)

    s = sub.add_parser("table1", parents=[common], help="Weierstrass grid-error table")
    s.add_argument("--c", type=parse_real, default=100.0)
    s.add_argument("--N", type=parse_list(int), default=None)
    s.add_argument("--s", type=parse_list(parse_real), default=None)
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("approx", parents=[common], help="error sweep over N for a test function")
    s.add_argument("--c", type=parse_real, required=True)
    s.add_argument("--N", type=parse_list(int), default=None)
    s.add_argument("--kind", choices=("weierstrass", "random_series", "exponential"),
                   default="weierstrass")
    s.add_argument("--s", type=parse_list(parse_real), default=None)
    s.add_argument("--lambda", dest="lam", type=parse_real, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--route", choices=("auto", "quadrature", "fourier", "closed_form"), default="auto")
    s.add_argument("--quad-order", type=int, default=None)
    s.add_argument("--fourier-K", type=int, default=None)
    s.add_argument("--inclusive", action="store_true", help="partial sums over n <= N")
    s.set_defaults(func=cmd_approx)

    s = sub.add_parser("check", parents=[common], help="run the inequality suite")
    s.add_argument("--c", type=parse_list(parse_real), default=[])
    s.add_argument("--n-max", type=int, default=None)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("oracle-compare", parents=[common], help="lambda_n against the Nystrom oracle")
    s.add_argument("--c", type=parse_real, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--quad-order", type=int, default=None)
    s.add_argument("--kernel", choices=("sinc", "fourier"), default="fourier")
    s.set_defaults(func=cmd_oracle_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        return int(args.func(args))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write("prolate %s: error: %s\n" % (args.command, exc))
        return 2
    except Exception as exc:  # reported, not raised, for a clean exit status
        sys.stderr.write("prolate %s: %s: %s\n" % (args.command, type(exc).__name__, exc))
        return 1
    finally:
        if os.environ.get("PROLATE_TIMING"):
            sys.stderr.write("elapsed %.3f s\n" % (time.perf_counter() - t0))


if __name__ == "__main__":
    sys.exit(main())
