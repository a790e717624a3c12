"""Case-by-case checks of the number-theoretic and linear-algebra identities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from dicerun.errors import DomainError
from dicerun.exact import a_eval, e3, gcd_report, singlerec_sides
from dicerun.markov import det_h, det_mn, solve_expectations


@dataclass
class CaseResult:
    n: int
    ok: bool
    detail: dict = field(default_factory=dict)


@dataclass
class VerifyReport:
    theorem: str
    min_n: int
    max_n: int
    cases: list[CaseResult]

    @property
    def checked(self) -> int:
        return len(self.cases)

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.ok]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def first_counterexample(self) -> Optional[CaseResult]:
        fails = self.failures
        return fails[0] if fails else None


def _gcd(n: int) -> Optional[CaseResult]:
    r = gcd_report(n)
    return CaseResult(n, r.gcd_ok, {"actual": str(r.gcd_actual), "predicted": str(r.gcd_predicted)})


def _residue(n: int) -> Optional[CaseResult]:
    r = gcd_report(n)
    return CaseResult(
        n, r.residue_ok, {"actual": str(r.residue_actual), "predicted": str(r.residue_predicted)}
    )


def _nu2(n: int) -> Optional[CaseResult]:
    if n % 12 != 2:
        return None
    r = gcd_report(n)
    return CaseResult(n, bool(r.nu2_ok), {"actual": str(r.nu2_a), "predicted": str(r.nu2_predicted)})


def _integrality(n: int) -> Optional[CaseResult]:
    r = gcd_report(n)
    return CaseResult(n, r.integrality_ok, {"e3_is_integer": r.e3_is_integer})


def _det(n: int) -> Optional[CaseResult]:
    dm, dh = det_mn(n), det_h(n)
    want_m = n**n * a_eval(n, n)
    want_h = (-1) ** (n + 1) * n ** (2 * n - 3)
    return CaseResult(
        n,
        dm == want_m and dh == want_h,
        {"det_m": str(dm), "det_m_expected": str(want_m), "det_h": str(dh), "det_h_expected": str(want_h)},
    )


def _oracle(n: int) -> Optional[CaseResult]:
    mu_n = solve_expectations(n)[-1]
    want = e3(n)
    return CaseResult(n, mu_n == want, {"mu_n": str(mu_n), "e3": str(want)})


def _singlerec(n: int) -> Optional[CaseResult]:
    for i in range(2, n + 1):
        lhs, rhs = singlerec_sides(n, i)
        if lhs != rhs:
            return CaseResult(n, False, {"i": i, "lhs": str(lhs), "rhs": str(rhs)})
    return CaseResult(n, True)


CHECKS: dict[str, Callable[[int], Optional[CaseResult]]] = {
    "gcd": _gcd,
    "residue": _residue,
    "nu2": _nu2,
    "integrality": _integrality,
    "det": _det,
    "oracle": _oracle,
    "singlerec": _singlerec,
}


def verify_theorem(theorem: str, max_n: int, min_n: int = 3) -> VerifyReport:
    """Check one identity for every n in [min_n, max_n]; nu2 only visits n = 2 (mod 12)."""
    try:
        check = CHECKS[theorem]
    except KeyError:
        raise DomainError(f"unknown theorem {theorem!r}; choose from {sorted(CHECKS)}") from None
    if min_n < 3:
        raise DomainError("min_n must be >= 3")
    if max_n < min_n:
        raise DomainError(f"max_n must be >= {min_n}, got {max_n}")
    cases = [c for c in (check(n) for n in range(min_n, max_n + 1)) if c is not None]
    return VerifyReport(theorem, min_n, max_n, cases)
