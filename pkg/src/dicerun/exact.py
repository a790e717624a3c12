"""Exact integer and rational computations for the discrete die.

The central object is the integer polynomial family

    a_1(x) = x - 1
    a_2(x) = x (x - 2)
    a_{i+2}(x) = (2x - 1) a_{i+1}(x) - (x^2 - x + 1) a_i(x)

whose value a_n(n) is the denominator of E_3(n) = n^n / a_n(n), the expected
number of rolls of a fair n-sided die until three strictly increasing
consecutive values appear.  Three evaluation routes are provided (linear
iteration, 2x2 matrix powering, closed form in Z[sqrt(-3)]) so they can be
checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional

from dicerun.errors import DomainError, InternalInconsistency

# Reduced ratio of arbitrary-precision integers.  Fraction already keeps
# gcd(num, den) == 1 and den >= 1 after every operation.
ExactRational = Fraction


def _check_positive(name: str, value: int, minimum: int) -> None:
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")


# ---------------------------------------------------------------------------
# Integer polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialZ:
    """Polynomial with integer coefficients, lowest degree first."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs or (0,))

    @property
    def degree(self) -> int:
        if self.coeffs == (0,):
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: PolynomialZ) -> PolynomialZ:
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (size - len(self.coeffs))
        b = other.coeffs + (0,) * (size - len(other.coeffs))
        return PolynomialZ(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> PolynomialZ:
        return PolynomialZ(tuple(-c for c in self.coeffs))

    def __sub__(self, other: PolynomialZ) -> PolynomialZ:
        return self + (-other)

    def __mul__(self, other: PolynomialZ) -> PolynomialZ:
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolynomialZ(tuple(out))

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{k}")
        return " + ".join(reversed(terms)) if terms else "0"


def a_poly(i: int) -> PolynomialZ:
    """Coefficients of a_i(x)."""
    _check_positive("i", i, 1)
    lin = PolynomialZ((-1, 2))  # 2x - 1
    quad = PolynomialZ((1, -1, 1))  # x^2 - x + 1
    prev, cur = PolynomialZ((-1, 1)), PolynomialZ((0, -2, 1))
    if i == 1:
        return prev
    for _ in range(i - 2):
        prev, cur = cur, lin * cur - quad * prev
    return cur


# ---------------------------------------------------------------------------
# Evaluating a_i(n)
# ---------------------------------------------------------------------------


def a_eval(n: int, i: int) -> int:
    """a_i(n) by direct iteration of the recurrence (O(i) big-int steps)."""
    _check_positive("n", n, 1)
    _check_positive("i", i, 1)
    prev, cur = n - 1, n * (n - 2)
    if i == 1:
        return prev
    p, q = 2 * n - 1, n * n - n + 1
    for _ in range(i - 2):
        prev, cur = cur, p * cur - q * prev
    return cur


def a_sequence(n: int, i_max: int) -> list[int]:
    """[a_1(n), ..., a_{i_max}(n)] in one pass."""
    _check_positive("n", n, 1)
    _check_positive("i_max", i_max, 1)
    out = [n - 1, n * (n - 2)]
    p, q = 2 * n - 1, n * n - n + 1
    while len(out) < i_max:
        out.append(p * out[-1] - q * out[-2])
    return out[:i_max]


Mat2 = tuple[tuple[int, int], tuple[int, int]]


def _mat_mul(a: Mat2, b: Mat2) -> Mat2:
    (a00, a01), (a10, a11) = a
    (b00, b01), (b10, b11) = b
    return (
        (a00 * b00 + a01 * b10, a00 * b01 + a01 * b11),
        (a10 * b00 + a11 * b10, a10 * b01 + a11 * b11),
    )


def _mat_pow(m: Mat2, e: int) -> Mat2:
    result: Mat2 = ((1, 0), (0, 1))
    while e:
        if e & 1:
            result = _mat_mul(result, m)
        m = _mat_mul(m, m)
        e >>= 1
    return result


def a_eval_fast(n: int, i: int) -> int:
    """a_i(n) by repeated squaring of the companion matrix (O(log i) products)."""
    _check_positive("n", n, 1)
    _check_positive("i", i, 1)
    if i == 1:
        return n - 1
    companion: Mat2 = ((2 * n - 1, -(n * n - n + 1)), (1, 0))
    (m00, m01), _ = _mat_pow(companion, i - 2)
    return m00 * (n * (n - 2)) + m01 * (n - 1)


# ---------------------------------------------------------------------------
# Z[sqrt(-3)] arithmetic and the closed form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SqrtM3Number:
    """Exact number ``re + sq * sqrt(-3)`` with rational components.

    Components may be plain ints; they stay ints under ring operations, which
    keeps the closed-form power loop free of fraction normalisation.
    """

    re: Rational = 0
    sq: Rational = 0

    @staticmethod
    def _lift(other) -> SqrtM3Number:
        if isinstance(other, SqrtM3Number):
            return other
        if isinstance(other, Rational):
            return SqrtM3Number(other, 0)
        return NotImplemented

    def __add__(self, other) -> SqrtM3Number:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return SqrtM3Number(self.re + other.re, self.sq + other.sq)

    __radd__ = __add__

    def __neg__(self) -> SqrtM3Number:
        return SqrtM3Number(-self.re, -self.sq)

    def __sub__(self, other) -> SqrtM3Number:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return SqrtM3Number(self.re - other.re, self.sq - other.sq)

    def __rsub__(self, other) -> SqrtM3Number:
        return (-self) + other

    def __mul__(self, other) -> SqrtM3Number:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.sq, other.re, other.sq
        return SqrtM3Number(a * c - 3 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> SqrtM3Number:
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = SqrtM3Number(1, 0)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> SqrtM3Number:
        return SqrtM3Number(self.re, -self.sq)

    def norm(self) -> Rational:
        """z * conj(z), always rational and non-negative."""
        return self.re * self.re + 3 * self.sq * self.sq

    def is_rational(self) -> bool:
        return self.sq == 0


def closed_form_constants(n: int) -> dict[str, SqrtM3Number]:
    """Roots lambda_1, lambda_2 and coefficients X, Y with a_i(n) = X l1^(i-1) + Y l2^(i-1)."""
    _check_positive("n", n, 1)
    half = Fraction(1, 2)
    lam1 = SqrtM3Number(n - half, half)
    x = SqrtM3Number(Fraction(n - 1, 2), Fraction(n + 1, 6))
    return {"lambda1": lam1, "lambda2": lam1.conjugate(), "X": x, "Y": x.conjugate()}


def a_closed(n: int, i: int) -> int:
    """a_i(n) from the closed form, evaluated exactly in Z[sqrt(-3)].

    Everything is scaled to integers: 2*lambda_1 = (2n-1) + sqrt(-3) and
    6*X = 3(n-1) + (n+1) sqrt(-3), with the factor 6 * 2^(i-1) divided out
    once at the end.  The two conjugate halves are powered independently, so a
    nonzero sqrt(-3) part in their sum means the ring arithmetic is broken.
    """
    _check_positive("n", n, 1)
    _check_positive("i", i, 1)
    twice_l1 = SqrtM3Number(2 * n - 1, 1)
    twice_l2 = SqrtM3Number(2 * n - 1, -1)
    six_x = SqrtM3Number(3 * (n - 1), n + 1)
    six_y = SqrtM3Number(3 * (n - 1), -(n + 1))
    total = six_x * twice_l1 ** (i - 1) + six_y * twice_l2 ** (i - 1)
    if total.sq != 0:
        raise InternalInconsistency(f"sqrt(-3) part {total.sq} != 0 for a_{i}({n})")
    value, rem = divmod(total.re, 6 << (i - 1))
    if rem:
        raise InternalInconsistency(f"closed form for a_{i}({n}) is not an integer")
    return value


# ---------------------------------------------------------------------------
# A_i / B_i pair
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ABPair:
    a_val: int
    b_val: int
    index: int


def ab_eval(n: int, i: int) -> ABPair:
    """(A_i(n), B_i(n)) from A_2 = 1, B_2 = 0 and

    A_{i+1} = (n^2 - 1) A_i - B_i,  B_{i+1} = (n^2 - n + 1)(A_i + B_i).
    """
    _check_positive("n", n, 1)
    _check_positive("i", i, 2)
    a, b = 1, 0
    sq, q = n * n - 1, n * n - n + 1
    for _ in range(i - 2):
        a, b = sq * a - b, q * (a + b)
    return ABPair(a, b, i)


def singlerec_sides(n: int, i: int) -> tuple[int, int]:
    """Both sides of n^3 (n-2) A_i(n) - n^3 B_i(n) = n^i a_i(n)."""
    pair = ab_eval(n, i)
    n3 = n**3
    return n3 * (n - 2) * pair.a_val - n3 * pair.b_val, n**i * a_eval(n, i)


# ---------------------------------------------------------------------------
# Expectations
# ---------------------------------------------------------------------------


def e3_unreduced(n: int) -> tuple[int, int]:
    """(n^n, a_n(n)) before cancelling common factors."""
    if n < 3:
        raise DomainError(f"E3 needs at least 3 sides, got n={n}")
    return n**n, a_eval(n, n)


def e3(n: int) -> Fraction:
    """Expected rolls of a fair n-sided die until three strictly increasing values in a row."""
    num, den = e3_unreduced(n)
    return Fraction(num, den)


def e2(n: int) -> Fraction:
    """Expected rolls until two strictly increasing values in a row: (n/(n-1))^n."""
    if n < 2:
        raise DomainError(f"E2 needs at least 2 sides, got n={n}")
    return Fraction(n, n - 1) ** n


# ---------------------------------------------------------------------------
# Number theory of a_n(n)
# ---------------------------------------------------------------------------


def nu2(m: int) -> int:
    """2-adic valuation of a nonzero integer."""
    if m == 0:
        raise DomainError("nu2(0) is undefined")
    return (m & -m).bit_length() - 1


def predicted_gcd(n: int) -> int:
    """gcd(n^n, a_n(n)) according to the residue-class formula (does not touch a_n)."""
    r = n % 12
    if r == 2:
        if n < 14:
            raise DomainError("the n = 2 (mod 12) case needs n >= 14")
        return (2 << nu2(n // 12)) * n * n
    if r in (5, 8, 11):
        return n * n
    return 1


def predicted_residue(n: int) -> int:
    """a_n(n) mod n^3 by residue class of n mod 3, in [0, n^3)."""
    n3 = n**3
    r = n % 3
    if r == 0:
        value = -(n * (n - 1) // 2) * n * n + 1
    elif r == 1:
        value = n * n - 1
    else:
        value = n * n * ((n + 1) * (n - 2) // 2)
    return value % n3


def predicted_nu2(n: int) -> int:
    """nu2(a_n(n)) for n = 2 (mod 12)."""
    if n % 12 != 2 or n < 14:
        raise DomainError(f"only defined for n = 2 (mod 12), n >= 14; got {n}")
    return 3 + nu2(n // 12)


@dataclass(frozen=True)
class GcdReport:
    n: int
    a_n: int
    gcd_actual: int
    gcd_predicted: int
    residue_class_mod12: int
    nu2_a: Optional[int]
    e3_is_integer: bool
    residue_actual: int
    residue_predicted: int
    nu2_predicted: Optional[int]

    @property
    def gcd_ok(self) -> bool:
        return self.gcd_actual == self.gcd_predicted

    @property
    def residue_ok(self) -> bool:
        return self.residue_actual == self.residue_predicted

    @property
    def nu2_ok(self) -> Optional[bool]:
        if self.nu2_a is None:
            return None
        return self.nu2_a == self.nu2_predicted

    @property
    def integrality_ok(self) -> bool:
        return self.e3_is_integer == (self.n == 3)


def gcd_report(n: int) -> GcdReport:
    """Measure gcd(n^n, a_n(n)) and related facts, alongside their predicted values."""
    if n < 3:
        raise DomainError(f"gcd report needs n >= 3, got {n}")
    numerator, a_n = e3_unreduced(n)
    nu2_a = nu2_pred = None
    if n % 12 == 2:
        nu2_a = nu2(a_n)
        nu2_pred = predicted_nu2(n)
    return GcdReport(
        n=n,
        a_n=a_n,
        gcd_actual=math.gcd(numerator, a_n),
        gcd_predicted=predicted_gcd(n),
        residue_class_mod12=n % 12,
        nu2_a=nu2_a,
        e3_is_integer=numerator % a_n == 0,
        residue_actual=a_n % n**3,
        residue_predicted=predicted_residue(n),
        nu2_predicted=nu2_pred,
    )
