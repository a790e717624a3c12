"""Exact linear-algebra route to E_3(n).

For an n-sided die let mu_i be the expected number of further rolls given the
previous roll was i and did not extend an increasing run.  Differencing the
first-step equations gives an integer system M_n U_n = V_n with M_n
lower-Hessenberg (zero above the superdiagonal).  Solving it exactly and
reading off mu_n gives E_3(n) without using the a_i recurrence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from dicerun.errors import DomainError, SingularMatrix


@dataclass(frozen=True)
class MarkovSystem:
    n: int
    m: tuple[tuple[int, ...], ...]
    v: tuple[int, ...]


def _entry(n: int, i: int, j: int) -> int:
    # 0-based indices
    last = n - 1
    if i == j == last:
        return n * n - n
    if i == j:
        return n * n - 1
    if j == i + 1:
        return n - n * n - 1
    if j > i + 1:
        return 0
    if i == last:
        return -n
    return -1


def build_system(n: int) -> MarkovSystem:
    if n < 3:
        raise DomainError(f"the Markov system needs n >= 3, got {n}")
    m = tuple(tuple(_entry(n, i, j) for j in range(n)) for i in range(n))
    v = tuple([n] * (n - 1) + [n * n])
    return MarkovSystem(n, m, v)


def solve_exact(m: Sequence[Sequence], v: Sequence) -> list[Fraction]:
    """Solve m x = v over the rationals by Gaussian elimination.

    Pivots on the first nonzero entry in each column; zero entries of the
    pivot row are skipped, which makes Hessenberg systems O(n^2).
    """
    size = len(m)
    rows = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(m, v)]
    for col in range(size):
        piv = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if piv is None:
            raise SingularMatrix(f"no nonzero pivot in column {col}")
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
        prow = rows[col]
        support = [c for c in range(col + 1, size + 1) if prow[c] != 0]
        for r in range(col + 1, size):
            factor = rows[r][col] / prow[col]
            if factor == 0:
                continue
            row = rows[r]
            row[col] = Fraction(0)
            for c in support:
                row[c] -= factor * prow[c]
    x = [Fraction(0)] * size
    for r in range(size - 1, -1, -1):
        acc = rows[r][size]
        for c in range(r + 1, size):
            if rows[r][c]:
                acc -= rows[r][c] * x[c]
        x[r] = acc / rows[r][r]
    return x


def bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(row) for row in m]
    size = len(a)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, size):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, size):
                # exact by Sylvester's identity
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[-1][-1]


def solve_expectations(n: int) -> list[Fraction]:
    """[mu_1, ..., mu_n] as exact rationals; mu_n equals E_3(n)."""
    system = build_system(n)
    return solve_exact(system.m, system.v)


def det_mn(n: int) -> int:
    return bareiss_det(build_system(n).m)


def h_submatrix(n: int) -> list[list[int]]:
    """M_n with its top row and rightmost column removed."""
    m = build_system(n).m
    return [list(row[:-1]) for row in m[1:]]


def det_h(n: int) -> int:
    return bareiss_det(h_submatrix(n))


def first_step_rhs(n: int, mu: Sequence[Fraction], i: int) -> Fraction:
    """Right-hand side of the first-step equation for mu_i (1-based i).

    mu_i = (2n-i)/n + (2n-i)/n^2 * sum_{j<=i} mu_j + 1/n^2 * sum_{j>i} (n-j+1) mu_j
    """
    nn = n * n
    head = sum(mu[:i], Fraction(0))
    tail = sum(((n - j + 1) * mu[j - 1] for j in range(i + 1, n + 1)), Fraction(0))
    return Fraction(2 * n - i, n) + Fraction(2 * n - i, nn) * head + tail / nn
