"""Finite interval unions in [0, 1), their exact Fourier coefficients and the
truncated Laurent (Toeplitz) matrices of the symbols chi_E and 2 chi_E - 1.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PavingLabError

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint half-open intervals ``[a, b)`` with rational endpoints."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple(sorted((Fraction(a), Fraction(b)) for a, b in self.intervals))
        prev = Fraction(0)
        for a, b in ivs:
            if not (0 <= a < b <= 1):
                raise PavingLabError(f"interval [{a}, {b}) is not a non-empty subinterval of [0, 1)")
            if a < prev:
                raise PavingLabError(f"interval [{a}, {b}) overlaps its predecessor")
            prev = b
        object.__setattr__(self, "intervals", ivs)

    @property
    def measure(self):
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def intersect_measure(self, lo, hi):
        lo, hi = Fraction(lo), Fraction(hi)
        return sum((max(Fraction(0), min(b, hi) - max(a, lo)) for a, b in self.intervals), Fraction(0))

    def gaps(self):
        out, prev = [], Fraction(0)
        for a, b in self.intervals:
            if a > prev:
                out.append((prev, a))
            prev = b
        if prev < 1:
            out.append((prev, Fraction(1)))
        return out

    def indicator(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, b in self.intervals:
            out[(t >= float(a)) & (t < float(b))] = 1.0
        return out

    def to_json(self):
        return {
            "intervals": [[a.numerator, a.denominator, b.numerator, b.denominator] for a, b in self.intervals]
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(tuple((Fraction(a, b), Fraction(c, d)) for a, b, c, d in obj["intervals"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise PavingLabError(f"malformed interval set: {exc}") from None


def fat_cantor_stage(s):
    """Finite-stage fat-Cantor-type set of measure exactly 1/2.

    Stage t < s inserts a centred subinterval into every gap, each taking the
    same fraction of its gap, so that the total measure becomes
    ``scale * (1 - 2^-t) / 2`` (the middle intervals removed when building a
    Smith-Volterra-Cantor set).  Stage s uses the fraction that brings it to 1/2.

    ``scale = min(1, 2^(3-s))`` keeps every piece of E and of its complement
    shorter than ``2 * 2^(1-s)``, so each dyadic cell of length ``2^(1-s)``
    meets both.  Without it the stage-1 interval of length 1/4 swallows whole
    cells once s >= 4.
    """
    if s < 1:
        raise PavingLabError("stage count must be >= 1")
    scale = min(Fraction(1), Fraction(2) ** (3 - s))
    intervals = []
    current = Fraction(0)
    for t in range(1, s + 1):
        target = HALF if t == s else scale * HALF * (1 - Fraction(1, 2**t))
        gaps = IntervalSet(tuple(intervals)).gaps() if intervals else [(Fraction(0), Fraction(1))]
        frac = (target - current) / (1 - current)
        for a, b in gaps:
            mid, half_len = (a + b) / 2, frac * (b - a) / 2
            intervals.append((mid - half_len, mid + half_len))
        current = target
    out = IntervalSet(tuple(intervals))
    assert out.measure == HALF
    return out


@dataclass(frozen=True)
class FourierCoefficients:
    mean: Fraction  # exact zeroth coefficient m(E)
    values: np.ndarray  # c(-N..N), index N holds c(0)

    @property
    def N(self):
        return (len(self.values) - 1) // 2

    def __getitem__(self, n):
        return self.values[n + self.N]


def fourier_coefficients(e, N):
    """``c(n) = int_E exp(-2 pi i n t) dt`` for ``|n| <= N`` in closed form."""
    if N < 0:
        raise PavingLabError("N must be >= 0")
    out = np.zeros(2 * N + 1, dtype=np.complex128)
    out[N] = float(e.measure)
    if N:
        ns = np.arange(1, N + 1)
        acc = np.zeros(N, dtype=np.complex128)
        for a, b in e.intervals:
            acc += np.exp(-2j * np.pi * ns * float(a)) - np.exp(-2j * np.pi * ns * float(b))
        pos = acc / (2j * np.pi * ns)
        out[N + 1:] = pos
        out[:N] = np.conj(pos[::-1])
    return FourierCoefficients(mean=e.measure, values=out)


def quadrature_coefficients(e, N, nodes=64):
    """Same coefficients by Gauss-Legendre quadrature on each interval (check path)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    ns = np.arange(-N, N + 1)
    out = np.zeros(2 * N + 1, dtype=np.complex128)
    for a, b in e.intervals:
        a, b = float(a), float(b)
        # split long intervals so the integrand has few oscillations per panel
        panels = max(1, int(np.ceil((b - a) * max(N, 1) / 2)))
        edges = np.linspace(a, b, panels + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            t = (hi - lo) / 2 * x + (hi + lo) / 2
            out += (hi - lo) / 2 * np.exp(-2j * np.pi * np.outer(ns, t)) @ w
    return out


SYMBOL_KINDS = ("projection", "reflection")


@dataclass(frozen=True)
class SymbolSpec:
    kind: str  # "projection" for chi_E, "reflection" for 2 chi_E - 1
    e: IntervalSet

    def __post_init__(self):
        if self.kind not in SYMBOL_KINDS:
            raise PavingLabError(f"symbol kind must be one of {SYMBOL_KINDS}, got {self.kind!r}")

    @property
    def mean(self):
        m = self.e.measure
        return m if self.kind == "projection" else 2 * m - 1


@dataclass(frozen=True)
class ToeplitzMatrix:
    N: int
    coefficients: np.ndarray  # a(-2N..2N), index 2N holds a(0)
    matrix: np.ndarray  # (2N+1) x (2N+1), entry (j, k) = a(j - k)


def truncated_laurent(spec, N):
    """Compression of the Laurent operator of the symbol to indices -N..N."""
    if N < 0:
        raise PavingLabError("N must be >= 0")
    c = fourier_coefficients(spec.e, 2 * N)
    a = c.values.copy()
    if spec.kind == "reflection":
        a = 2 * a
    a[2 * N] = float(spec.mean)  # exact rational mean, 0.0 when m(E) = 1/2
    idx = np.arange(2 * N + 1)
    mat = a[(idx[:, None] - idx[None, :]) + 2 * N]
    return ToeplitzMatrix(N=N, coefficients=a, matrix=mat)


@dataclass(frozen=True)
class BidensityReport:
    h: Fraction
    inside: tuple  # m(E intersect cell) per cell
    outside: tuple  # m(cell minus E) per cell
    min_inside: Fraction
    min_outside: Fraction

    @property
    def certified(self):
        return self.min_inside > 0 and self.min_outside > 0

    def to_json(self):
        return {
            "h": str(self.h),
            "min_inside": str(self.min_inside),
            "min_outside": str(self.min_outside),
            "certified": self.certified,
            "inside": [str(x) for x in self.inside],
            "outside": [str(x) for x in self.outside],
        }


def bidensity_report(e, h):
    """Exact measure of E and of its complement in each cell ``[jh, (j+1)h)``."""
    h = Fraction(h)
    if h <= 0 or (1 / h).denominator != 1:
        raise PavingLabError(f"1/h must be a positive integer, got h = {h}")
    cells = int(1 / h)
    inside = tuple(e.intersect_measure(j * h, (j + 1) * h) for j in range(cells))
    outside = tuple(h - x for x in inside)
    return BidensityReport(h=h, inside=inside, outside=outside,
                           min_inside=min(inside), min_outside=min(outside))
