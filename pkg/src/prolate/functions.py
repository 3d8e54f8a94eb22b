"""Target functions on [-1, 1] for the approximation experiments.

Every spec is an immutable description with an ``evaluate(x)`` method and a
``kind`` tag. Periodic kinds also expose their Fourier coefficients

    b_k(f) = (1/sqrt 2) int_{-1}^{1} f(x) exp(-i pi k x) dx,

so that ``f(x) = (1/sqrt 2) sum_k b_k exp(i pi k x)``.

Kinds:

``exponential``   ``exp(i lam x)``
``weierstrass``   ``sum_{k=0}^{K_w} 2^(-k s) cos(2^k x)``, ``K_w = ceil(52/s) + 2``
``random_series`` ``sum_{k=1}^{T} X_k k^(-s) cos(k pi x)`` with Gaussian X_k
``samples``       tabulated values, linear interpolation between grid points
``fourier``       finite Fourier series from a map ``k -> b_k``
``sinc``          ``sin(w x) / (pi x)`` scaled to unit L2(R) norm (band-limited)
``bump``          ``(1 - x^2)^p`` on [-1, 1], zero outside, unit L2(R) norm
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from prolate.specfun import gauss_legendre, spherical_bessel_table

__all__ = [
    "FunctionSpec", "Exponential", "Weierstrass", "RandomSeries", "Samples",
    "FourierSeries", "Sinc", "Bump", "gaussian_sequence", "weierstrass_terms",
    "make_function",
]


class FunctionSpec:
    kind = "abstract"
    is_real = True

    def evaluate(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.evaluate(x)

    def fourier_coefficients(self) -> dict:
        raise TypeError("%s functions have no finite Fourier series" % self.kind)

    def l2_norm_sq(self) -> float:
        """``int_{-1}^{1} |f|^2``."""
        rule = gauss_legendre(2048)
        return float(np.sum(rule.weights * np.abs(self.evaluate(rule.nodes)) ** 2))

    def sobolev_norm_sq(self, s: float) -> float | None:
        """Frequency-content proxy for the squared H^s norm; None when unknown."""
        return None


@dataclass(frozen=True)
class Exponential(FunctionSpec):
    lam: float
    kind = "exponential"
    is_real = False

    def evaluate(self, x):
        return np.exp(1j * self.lam * np.asarray(x, dtype=float))

    def l2_norm_sq(self) -> float:
        return 2.0

    def sobolev_norm_sq(self, s: float) -> float:
        return 2.0 * (1.0 + self.lam ** 2) ** s


def weierstrass_terms(s: float) -> int:
    """Truncation index K_w: the dropped tail sum_{k > K_w} 2^(-k s) is below 2^-52."""
    return int(math.ceil(52.0 / s)) + 2


@dataclass(frozen=True)
class Weierstrass(FunctionSpec):
    s: float
    kind = "weierstrass"

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("Weierstrass exponent s must be positive")

    @property
    def terms(self) -> int:
        return weierstrass_terms(self.s)

    def amplitudes(self):
        k = np.arange(self.terms + 1)
        return 2.0 ** (-k * self.s), 2.0 ** k

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        amp, freq = self.amplitudes()
        out = np.zeros_like(x)
        # smallest terms first
        for a, w in zip(amp[::-1], freq[::-1]):
            out = out + a * np.cos(w * x)
        return out

    def l2_norm_sq(self) -> float:
        # int cos(a x) cos(b x) = sinc-type closed form; quadrature would alias 2^k
        amp, freq = self.amplitudes()
        d = freq[:, None] - freq[None, :]
        t = freq[:, None] + freq[None, :]
        diff = np.where(d == 0, 1.0, np.sin(d) / np.where(d == 0, 1.0, d))
        gram = diff + np.sin(t) / t
        return float(amp @ gram @ amp)

    def sobolev_norm_sq(self, s: float) -> float:
        amp, freq = self.amplitudes()
        return float(np.sum((1.0 + freq ** 2) ** s * amp ** 2))


def gaussian_sequence(seed: int, count: int) -> np.ndarray:
    """Standard normal draws from Philox4x64-10 keyed by ``seed``.

    Each raw 64-bit output is mapped to a 53-bit uniform ``(r >> 11) * 2^-53``
    in [0, 1); consecutive pairs (u1, u2) give
    ``sqrt(-2 ln(1 - u1)) * (cos(2 pi u2), sin(2 pi u2))`` (Box-Muller).
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    pairs = (count + 1) // 2
    gen = np.random.Philox(key=int(seed) & (2 ** 64 - 1))
    raw = gen.random_raw(2 * pairs)
    u = (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    u1 = 1.0 - u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(2.0 * np.pi * u2)
    out[1::2] = r * np.sin(2.0 * np.pi * u2)
    return out[:count]


@dataclass(frozen=True)
class RandomSeries(FunctionSpec):
    s: float
    seed: int = 0
    term_count: int = 4096
    kind = "random_series"

    def amplitudes(self) -> np.ndarray:
        """``X_k k^(-s)`` for k = 1..term_count."""
        k = np.arange(1, self.term_count + 1, dtype=float)
        return gaussian_sequence(self.seed, self.term_count) * k ** (-self.s)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        amp = self.amplitudes()
        out = np.zeros(flat.size)
        k = np.arange(1, self.term_count + 1, dtype=float)
        step = 256
        for i in range(0, flat.size, step):
            xs = flat[i:i + step]
            out[i:i + step] = np.cos(np.pi * np.outer(xs, k)) @ amp
        return out.reshape(x.shape)

    def fourier_coefficients(self) -> dict:
        amp = self.amplitudes() / math.sqrt(2.0)
        b = {}
        for k, a in enumerate(amp.tolist(), start=1):
            b[k] = a
            b[-k] = a
        return b

    def sobolev_norm_sq(self, s: float) -> float:
        k = np.arange(1, self.term_count + 1, dtype=float)
        return float(np.sum((1.0 + (np.pi * k) ** 2) ** s * self.amplitudes() ** 2))


@dataclass(frozen=True)
class Samples(FunctionSpec):
    grid: tuple
    values: tuple
    kind = "samples"

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0):
            raise ValueError("sample grid must be strictly increasing with at least 2 points")
        if len(self.values) != g.size:
            raise ValueError("grid and values differ in length")

    @classmethod
    def from_arrays(cls, grid, values) -> "Samples":
        return cls(tuple(np.asarray(grid, dtype=float).tolist()),
                   tuple(np.asarray(values).tolist()))

    @property
    def is_real(self):
        return not np.iscomplexobj(np.asarray(self.values))

    def evaluate(self, x):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values)
        x = np.asarray(x, dtype=float)
        if np.any(x < g[0] - 1e-14) or np.any(x > g[-1] + 1e-14):
            raise ValueError("sample evaluation outside the tabulated grid")
        idx = np.searchsorted(g, x)
        exact = (idx < g.size) & (g[np.minimum(idx, g.size - 1)] == x)
        if np.iscomplexobj(v):
            out = np.interp(x, g, v.real) + 1j * np.interp(x, g, v.imag)
        else:
            out = np.interp(x, g, v)
        out = np.asarray(out)
        out[exact] = v[idx[exact]]
        return out


@dataclass(frozen=True)
class FourierSeries(FunctionSpec):
    b: Mapping = field(default_factory=dict)
    kind = "fourier"

    def __post_init__(self):
        object.__setattr__(self, "b", dict(sorted(dict(self.b).items())))

    def __hash__(self):
        return hash(tuple(self.b.items()))

    @property
    def is_real(self):
        return all(abs(complex(self.b.get(-k, 0)) - complex(v).conjugate()) == 0
                   for k, v in self.b.items())

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for k, v in self.b.items():
            out = out + complex(v) * np.exp(1j * math.pi * k * x)
        out /= math.sqrt(2.0)
        return out.real if self.is_real else out

    def fourier_coefficients(self) -> dict:
        return dict(self.b)

    def l2_norm_sq(self) -> float:
        return float(sum(abs(complex(v)) ** 2 for v in self.b.values()))

    def sobolev_norm_sq(self, s: float) -> float:
        return float(sum((1.0 + (math.pi * k) ** 2) ** s * abs(complex(v)) ** 2
                         for k, v in self.b.items()))


def _sine_integral(z: float) -> float:
    """Si(z) by composite Gauss-Legendre on panels of width <= pi."""
    if z == 0:
        return 0.0
    panels = max(1, int(math.ceil(abs(z) / math.pi)))
    rule = gauss_legendre(32)
    edges = np.linspace(0.0, abs(z), panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b - a) * rule.nodes + 0.5 * (a + b)
        total += 0.5 * (b - a) * float(np.sum(rule.weights * np.sinc(t / math.pi)))
    return math.copysign(total, z)


@dataclass(frozen=True)
class Sinc(FunctionSpec):
    """``sin(w x)/(pi x)`` normalized in L2(R); band-limited to [-w, w]."""

    w: float
    kind = "sinc"

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(self.w / math.pi)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * (self.w / math.pi) * np.sinc(self.w * x / math.pi)

    def time_tail_sq(self) -> float:
        """``int_{|t| > 1} |f|^2``."""
        w = self.w
        tail = math.sin(w) ** 2 + w * (math.pi / 2 - _sine_integral(2 * w))
        return self.scale ** 2 * 2.0 / math.pi ** 2 * tail

    def band_tail_sq(self, c: float) -> float:
        if self.w <= c:
            return 0.0
        return (self.w - c) / self.w


@dataclass(frozen=True)
class Bump(FunctionSpec):
    """``(1 - x^2)^p`` on [-1, 1], zero outside, unit L2(R) norm (integer p >= 1)."""

    p: int = 2
    kind = "bump"

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValueError("bump exponent must be a positive integer")

    def _poly(self):
        from numpy.polynomial import polynomial as P
        return P.polypow([1.0, 0.0, -1.0], int(self.p))

    @property
    def scale(self) -> float:
        from numpy.polynomial import polynomial as P
        sq = P.polyint(P.polymul(self._poly(), self._poly()))
        return 1.0 / math.sqrt(P.polyval(1.0, sq) - P.polyval(-1.0, sq))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= 1.0, self.scale * (1.0 - x * x) ** self.p, 0.0)

    def l2_norm_sq(self) -> float:
        return 1.0

    def transform(self, omega):
        """``f^(w) = int f(x) exp(-i w x) dx`` (real and even)."""
        omega = np.abs(np.atleast_1d(np.asarray(omega, dtype=float)))
        p = int(self.p)
        out = np.empty(omega.shape)
        small = omega < 1e-3
        out[small] = self.scale * 2.0 * math.gamma(p + 1) ** 2 * 4.0 ** p / math.gamma(2 * p + 2)
        big = ~small
        if np.any(big):
            j = spherical_bessel_table(p, omega[big])[:, p]
            # sqrt(pi) Gamma(p+1) (2/w)^(p+1/2) J_{p+1/2}(w), J = j sqrt(2w/pi)
            out[big] = (self.scale * math.gamma(p + 1) * 2.0 ** (p + 1)
                        * omega[big] ** (-p) * j)
        return out

    def band_tail_sq(self, c: float, span: float = 4000.0) -> float:
        """``(1/2 pi) int_{|w| > c} |f^|^2``: panels up to ``c + span`` plus the mean-square tail."""
        rule = gauss_legendre(24)
        edges = np.arange(c, c + span + 1e-9, math.pi)
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            t = 0.5 * (b - a) * rule.nodes + 0.5 * (a + b)
            total += 0.5 * (b - a) * float(np.sum(rule.weights * self.transform(t) ** 2))
        top = edges[-1]
        p = int(self.p)
        tail = (self.scale ** 2 * math.gamma(p + 1) ** 2 * 2.0 ** (2 * p + 1)
                * top ** (-2 * p - 1) / (2 * p + 1))
        return (total + tail) / math.pi

    def derivative_norm_sq(self, s: int) -> float:
        """``int |f^(s)|^2`` over [-1, 1] for integer s <= p (equals M_f^2)."""
        from numpy.polynomial import polynomial as P
        d = P.polyder(self._poly(), int(s)) * self.scale
        sq = P.polyint(P.polymul(d, d))
        return float(P.polyval(1.0, sq) - P.polyval(-1.0, sq))


def make_function(kind: str, **params) -> FunctionSpec:
    kinds = {
        "exponential": Exponential, "weierstrass": Weierstrass,
        "random_series": RandomSeries, "fourier": FourierSeries,
        "sinc": Sinc, "bump": Bump,
    }
    if kind == "samples":
        return Samples.from_arrays(params["grid"], params["values"])
    if kind not in kinds:
        raise ValueError("unknown function kind %r" % (kind,))
    return kinds[kind](**params)
