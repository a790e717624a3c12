"""The many-sided limit: uniform reals on [0, 1).

Counting permutations with no increasing run of length >= 3, split by how
they end, gives three integer sequences:

    f(n)  ... end with exactly one run of length 3 (the last three entries)
    g(n)  ... end with a single rise
    h(n)  ... end with a fall

Their exponential generating functions F, G, H have closed forms in tan, sec
and exp.  The stopping time has probability generating function
P(x) = F(x) - 1, so p(n) = f(n)/n! for n >= 1.

High-precision work goes through private mpmath contexts so concurrent
callers with different precisions do not interfere.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath

from dicerun.errors import DomainError, PoleProximity

DEFAULT_PRECISION = 128
PRECISION_ENV = "DICERUN_PRECISION"


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    return int(raw)


def working_context(bits: int) -> mpmath.ctx_mp.MPContext:
    if bits < 53:
        raise DomainError(f"precision must be at least 53 bits, got {bits}")
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


@dataclass(frozen=True)
class PrecisionReal:
    value: mpmath.mpf
    precision_bits: int

    def __float__(self) -> float:
        return float(self.value)

    def to_string(self, digits: int | None = None) -> str:
        if digits is None:
            digits = max(1, int(self.precision_bits * 0.30103) - 2)
        return mpmath.nstr(self.value, digits, strip_zeros=False)


RealLike = Union[PrecisionReal, int, float, str, Fraction, mpmath.mpf]


def _as_mpf(ctx, x: RealLike):
    if isinstance(x, PrecisionReal):
        return ctx.mpf(x.value)
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


# ---------------------------------------------------------------------------
# Exact coefficient tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoeffTriple:
    n: int
    f: int
    g: int
    h: int


def pascal_rows(size: int) -> list[list[int]]:
    rows = [[1]]
    for n in range(1, size + 1):
        prev = rows[-1]
        rows.append([1] + [prev[k - 1] + prev[k] for k in range(1, n)] + [1])
    return rows


def fgh_table(max_n: int) -> list[CoeffTriple]:
    """Exact f, g, h for n = 0..max_n.

    For n >= 1, removing the largest element of a length-(n+1) permutation:

        f(n+1) = f(n) + g(n) + sum_{k=1}^{n-1} C(n,k) h(k) f(n-k)
        g(n+1) = g(n) + h(n) + sum_{k=1}^{n-1} C(n,k) h(k) g(n-k)
        h(n+1) = h(n)        + sum_{k=1}^{n-1} C(n,k) h(k) h(n-k)
    """
    if max_n < 0:
        raise DomainError("max_n must be non-negative")
    binom = pascal_rows(max_n)
    f, g, h = [1, 0], [1, 0], [1, 1]
    for n in range(1, max_n):
        row = binom[n]
        sf = sg = sh = 0
        for k in range(1, n):
            w = row[k] * h[k]
            sf += w * f[n - k]
            sg += w * g[n - k]
            sh += w * h[n - k]
        f.append(f[n] + g[n] + sf)
        g.append(g[n] + h[n] + sg)
        h.append(h[n] + sh)
    return [CoeffTriple(n, f[n], g[n], h[n]) for n in range(max_n + 1)]


@dataclass(frozen=True)
class PgfCoeff:
    n: int
    p: Fraction


@dataclass(frozen=True)
class PgfTable:
    coeffs: list[PgfCoeff]
    mass: Fraction
    first_moment: Fraction
    second_moment: Fraction

    @property
    def variance(self) -> Fraction:
        return self.second_moment - self.first_moment**2


def pgf(max_n: int) -> PgfTable:
    """Stopping-time probabilities p(0..max_n) and truncated moment sums."""
    table = fgh_table(max_n)
    coeffs = [PgfCoeff(0, Fraction(0))]
    mass = first = second = Fraction(0)
    fact = 1
    for row in table[1:]:
        fact *= row.n
        p = Fraction(row.f, fact)
        coeffs.append(PgfCoeff(row.n, p))
        mass += p
        first += row.n * p
        second += row.n * row.n * p
    return PgfTable(coeffs, mass, first, second)


def truncated_series(coeffs: list[int], x: RealLike, precision_bits: int) -> PrecisionReal:
    """sum_n coeffs[n] x^n / n! evaluated at the given precision."""
    ctx = working_context(precision_bits)
    xv = _as_mpf(ctx, x)
    term = ctx.mpf(1)
    total = ctx.mpf(0)
    for n, c in enumerate(coeffs):
        if n:
            term = term * xv / n
        total += c * term
    return PrecisionReal(total, precision_bits)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def closed_values(
    x: RealLike, precision_bits: int | None = None
) -> tuple[PrecisionReal, PrecisionReal, PrecisionReal]:
    """(F(x), G(x), H(x)) from their closed forms.

    With theta = pi/6 + x*sqrt(3)/2:
        H = 1/2 + (sqrt3/2) tan(theta)
        G = sec(theta) ((sqrt3/2) e^{x/2} - sin(x sqrt3/2))
        F = 2 + (sqrt3/2) e^{x/2} (x - 1) sec(theta)
    """
    bits = precision_bits or default_precision()
    ctx = working_context(bits)
    xv = _as_mpf(ctx, x)
    half_r3 = ctx.sqrt(3) / 2
    theta = ctx.pi / 6 + xv * half_r3
    cos_t = ctx.cos(theta)
    if abs(cos_t) < ctx.ldexp(1, -(bits // 2)):
        raise PoleProximity(f"x={ctx.nstr(xv, 15)} is within tolerance of a pole")
    grow = ctx.exp(xv / 2)
    h = ctx.mpf(1) / 2 + half_r3 * ctx.sin(theta) / cos_t
    g = (half_r3 * grow - ctx.sin(xv * half_r3)) / cos_t
    f = 2 + half_r3 * grow * (xv - 1) / cos_t
    return PrecisionReal(f, bits), PrecisionReal(g, bits), PrecisionReal(h, bits)


@dataclass(frozen=True)
class LimitStats:
    mu: PrecisionReal
    var: PrecisionReal
    fg_limit: PrecisionReal
    gh_limit: PrecisionReal
    pole_a: PrecisionReal


def limit_stats(precision_bits: int | None = None) -> LimitStats:
    """Mean and variance of the limiting stopping time, plus the ratio limits.

    With S = sin(sqrt3/2), C = cos(sqrt3/2), D = sqrt3*C - S:
        mu  = sqrt(3e) / D
        Var = (9 sqrt(e) C + sqrt(3e) S - 3e) / D^2
    The nearest pole of F, G, H is a = 2*pi*sqrt3/9, and
        f(n)/g(n) -> (a - 1)/(1 - e^{-a/2}),  g(n)/h(n) -> e^{a/2} - 1.
    """
    bits = precision_bits or default_precision()
    ctx = working_context(bits)
    r3 = ctx.sqrt(3)
    s, c = ctx.sin(r3 / 2), ctx.cos(r3 / 2)
    e = ctx.e
    d = r3 * c - s
    mu = ctx.sqrt(3 * e) / d
    var = (9 * ctx.sqrt(e) * c + ctx.sqrt(3 * e) * s - 3 * e) / (d * d)
    a = 2 * ctx.pi * r3 / 9
    fg = (a - 1) / (1 - ctx.exp(-a / 2))
    gh = ctx.exp(a / 2) - 1
    return LimitStats(*(PrecisionReal(v, bits) for v in (mu, var, fg, gh, a)))


def e3_continuous(x: RealLike, precision_bits: int | None = None) -> PrecisionReal:
    """E_3 extended to real x >= 3.

    E_3(x) = x^x / ((x^2-x+1)^((x-1)/2) ((x-1) cos(alpha) - (x+1) sin(alpha)/sqrt3)),
    alpha = (x-1) arctan(sqrt3 / (2x-1)).  Agrees with n^n / a_n(n) at integers.
    """
    bits = precision_bits or default_precision()
    ctx = working_context(bits)
    xv = _as_mpf(ctx, x)
    if xv < 3:
        raise DomainError(f"E3 is defined for x >= 3, got {ctx.nstr(xv, 15)}")
    r3 = ctx.sqrt(3)
    alpha = (xv - 1) * ctx.atan(r3 / (2 * xv - 1))
    trig = (xv - 1) * ctx.cos(alpha) - (xv + 1) * ctx.sin(alpha) / r3
    if abs(trig) < ctx.ldexp(1, -(bits // 2)):
        raise PoleProximity(f"denominator vanishes near x={ctx.nstr(xv, 15)}")
    log_value = xv * ctx.log(xv) - (xv - 1) / 2 * ctx.log(xv * xv - xv + 1)
    return PrecisionReal(ctx.exp(log_value) / trig, bits)
