from fractions import Fraction

import pytest
import sympy

from dicerun.errors import DomainError, SingularMatrix
from dicerun.exact import a_eval, e3
from dicerun.markov import (
    bareiss_det,
    build_system,
    det_h,
    det_mn,
    first_step_rhs,
    h_submatrix,
    solve_exact,
    solve_expectations,
)


def chain_oracle(n):
    """Expected further rolls from every (last value, run length) state.

    Built straight from the die process, independent of M_n: a roll w > v
    extends the run, anything else restarts it at length 1.
    """
    states = [(v, r) for v in range(1, n + 1) for r in (1, 2)]
    index = {s: k for k, s in enumerate(states)}
    size = len(states)
    a = sympy.zeros(size, size)
    b = sympy.ones(size, 1)
    for (v, r), row in index.items():
        a[row, row] += 1
        for w in range(1, n + 1):
            if w > v and r == 2:
                continue  # run of three completed
            nxt = (w, r + 1) if w > v else (w, 1)
            a[row, index[nxt]] -= sympy.Rational(1, n)
    sol = a.LUsolve(b)
    start = 1 + sum(sol[index[(w, 1)]] for w in range(1, n + 1)) / n
    mu = [sol[index[(v, 1)]] for v in range(1, n + 1)]
    return Fraction(str(start)), [Fraction(str(m)) for m in mu]


def cofactor_det(m):
    if len(m) == 1:
        return m[0][0]
    return sum(
        (-1) ** j * m[0][j] * cofactor_det([row[:j] + row[j + 1 :] for row in m[1:]])
        for j in range(len(m))
    )


def test_build_system_n3():
    s = build_system(3)
    assert s.m == ((8, -7, 0), (-1, 8, -7), (-3, -3, 6))
    assert s.v == (3, 3, 9)


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_system_shape(n):
    s = build_system(n)
    for i in range(n):
        for j in range(n):
            if j > i + 1:
                assert s.m[i][j] == 0
    assert s.m[n - 1][n - 1] == n * n - n
    assert s.v[n - 1] == n * n
    assert all(x == n for x in s.v[:-1])


def test_build_system_domain():
    with pytest.raises(DomainError):
        build_system(2)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_solution_matches_chain_oracle(n):
    start, mu_oracle = chain_oracle(n)
    mu = solve_expectations(n)
    assert mu == mu_oracle
    assert start == e3(n) == mu[-1]


def test_solve_examples():
    assert solve_expectations(3)[-1] == 27
    assert solve_expectations(6)[-1] == Fraction(46656, 3781)
    mu4 = solve_expectations(4)
    assert mu4[-1] == Fraction(256, 15)
    assert all(m > 0 for m in mu4)


@pytest.mark.parametrize("n", range(3, 21))
def test_first_step_equations(n):
    mu = solve_expectations(n)
    assert all(m > 0 for m in mu)
    for i in range(1, n + 1):
        assert mu[i - 1] == first_step_rhs(n, mu, i)


def test_solver_handles_zero_leading_pivot():
    m = [[0, 2, 1], [1, 1, 0], [2, 0, 3]]
    x = solve_exact(m, [3, 2, 5])
    assert x == [Fraction(1), Fraction(1), Fraction(1)]


def test_solver_singular():
    with pytest.raises(SingularMatrix):
        solve_exact([[1, 2], [2, 4]], [1, 2])


def test_bareiss_matches_cofactor():
    mats = [
        [[2, -1, 0], [1, 3, 5], [0, 4, -2]],
        [[0, 1], [1, 0]],
        [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
        [[1, 2], [2, 4]],
        [[5]],
    ]
    for m in mats:
        assert bareiss_det(m) == cofactor_det(m)
    for n in range(3, 8):
        m = [list(r) for r in build_system(n).m]
        assert bareiss_det(m) == cofactor_det(m)


def test_det_examples():
    assert det_mn(3) == 27 == cofactor_det([list(r) for r in build_system(3).m])
    assert det_mn(4) == 3840
    assert det_mn(6) == 6**6 * 3781
    assert h_submatrix(3) == [[-1, 8], [-3, -3]]
    assert det_h(3) == 27
    assert det_h(4) == -1024


@pytest.mark.parametrize("n", range(3, 31))
def test_determinant_identities(n):
    assert det_mn(n) == n**n * a_eval(n, n)
    assert det_h(n) == (-1) ** (n + 1) * n ** (2 * n - 3)


def test_mu_n_from_determinant():
    for n in range(3, 15):
        assert solve_expectations(n)[-1] == Fraction(n ** (2 * n), det_mn(n))
