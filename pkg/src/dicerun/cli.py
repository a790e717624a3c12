"""Command-line front end.

Every subcommand prints one JSON document (or a CSV table for
``series --format csv``).  Exact integers and rationals are emitted as
decimal strings; approximations carry their precision in bits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from typing import Any, Optional, Sequence

import mpmath

from dicerun import __version__
from dicerun.errors import DomainError, PoleProximity
from dicerun.exact import e2, e3, gcd_report
from dicerun.limiting import (
    default_precision,
    e3_continuous,
    fgh_table,
    limit_stats,
    pgf,
    working_context,
)
from dicerun.markov import build_system, det_h, det_mn, solve_expectations
from dicerun.simulation import CONTINUOUS, RNG_DESCRIPTION, SimConfig, simulate
from dicerun.verify import CHECKS, verify_theorem

SERIES_CSV_HEADER = ["n", "f", "g", "h", "p_numerator", "p_denominator"]


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise _ArgumentError(f"{self.prog}: error: {message}")


def rational(q: Fraction) -> dict[str, str]:
    return {"numerator": str(q.numerator), "denominator": str(q.denominator)}


def approx(q: Fraction, bits: int) -> dict[str, Any]:
    ctx = working_context(bits)
    value = ctx.mpf(q.numerator) / q.denominator
    digits = max(1, int(bits * 0.30103) - 2)
    return {"value": mpmath.nstr(value, digits), "precision_bits": bits}


def render(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# subcommands: each returns (results, metadata-extras, exit status)
# ---------------------------------------------------------------------------


def cmd_expect(args) -> tuple[dict, dict, int]:
    bits = args.precision or default_precision()
    n = args.n
    if args.k == 3:
        value = e3(n)
        report = gcd_report(n)
        results = {
            "expectation": rational(value),
            "unreduced": {"numerator": str(n**n), "denominator": str(report.a_n)},
            "approx": approx(value, bits),
            "gcd": str(report.gcd_actual),
            "gcd_report": {
                "gcd_actual": str(report.gcd_actual),
                "gcd_predicted": str(report.gcd_predicted),
                "residue_class_mod12": report.residue_class_mod12,
                "a_n_mod_n3": str(report.residue_actual),
                "a_n_mod_n3_predicted": str(report.residue_predicted),
                "nu2_a": report.nu2_a,
                "nu2_predicted": report.nu2_predicted,
                "e3_is_integer": report.e3_is_integer,
            },
        }
    else:
        value = e2(n)
        results = {
            "expectation": rational(value),
            "unreduced": {"numerator": str(n**n), "denominator": str((n - 1) ** n)},
            "approx": approx(value, bits),
            "gcd": "1",
        }
    return results, {"precision_bits": bits}, 0


def cmd_verify(args) -> tuple[dict, dict, int]:
    report = verify_theorem(args.theorem, args.max_n)
    first = report.first_counterexample
    results = {
        "theorem": report.theorem,
        "status": "PASS" if report.passed else "FAIL",
        "checked": report.checked,
        "failed": len(report.failures),
        "first_counterexample": None if first is None else {"n": first.n, **first.detail},
        "cases": [{"n": c.n, "status": "PASS" if c.ok else "FAIL"} for c in report.cases],
    }
    return results, {}, 0 if report.passed else 1


def cmd_markov(args) -> tuple[dict, dict, int]:
    system = build_system(args.n)
    mu = solve_expectations(args.n)
    results = {
        "matrix": [[str(x) for x in row] for row in system.m],
        "rhs": [str(x) for x in system.v],
        "mu": [rational(q) for q in mu],
        "det_m": str(det_mn(args.n)),
        "det_h": str(det_h(args.n)),
        "e3": rational(e3(args.n)),
    }
    return results, {}, 0


def cmd_simulate(args) -> tuple[dict, dict, int]:
    cfg = SimConfig(args.sides, args.k, args.trials, args.seed)
    res = simulate(cfg, workers=args.workers)
    results = {
        "trials": res.trials,
        "mean": res.mean,
        "sample_variance": res.sample_variance,
        "std_error": res.std_error,
        "min_rolls": res.min_rolls,
        "max_rolls": res.max_rolls,
    }
    return results, {"rng": RNG_DESCRIPTION, "seed": args.seed}, 0


def cmd_limit(args) -> tuple[dict, dict, int]:
    bits = args.precision or default_precision()
    stats = limit_stats(bits)
    results = {
        name: getattr(stats, name).to_string()
        for name in ("mu", "var", "fg_limit", "gh_limit", "pole_a")
    }
    return results, {"precision_bits": bits}, 0


def series_rows(max_n: int) -> list[dict]:
    table = fgh_table(max_n)
    probs = pgf(max_n).coeffs
    return [
        {"n": t.n, "f": str(t.f), "g": str(t.g), "h": str(t.h), "p": rational(p.p)}
        for t, p in zip(table, probs)
    ]


def series_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SERIES_CSV_HEADER)
    for r in rows:
        writer.writerow([r["n"], r["f"], r["g"], r["h"], r["p"]["numerator"], r["p"]["denominator"]])
    return buf.getvalue()


def cmd_series(args) -> tuple[dict, dict, int]:
    if args.max_n < 0:
        raise DomainError("--max-n must be non-negative")
    return {"rows": series_rows(args.max_n)}, {}, 0


def cmd_continuous(args) -> tuple[dict, dict, int]:
    bits = args.precision or default_precision()
    value = e3_continuous(args.x, bits)
    return {"x": args.x, "e3": value.to_string()}, {"precision_bits": bits}, 0


# ---------------------------------------------------------------------------


def _sides(text: str):
    if text.lower() in ("inf", "infinity", "continuous"):
        return CONTINUOUS
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'inf', got {text!r}") from None


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _decimal(text: str) -> str:
    try:
        mpmath.mpf(text)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dicerun", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dicerun {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expect", help="exact expected number of rolls")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, choices=(2, 3), default=3)
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("verify", help="check a theorem case by case")
    p.add_argument("--theorem", choices=sorted(CHECKS), required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("markov", help="solve the linear system for all mu_i")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("simulate", help="seeded Monte Carlo estimate")
    p.add_argument("--sides", type=_sides, required=True)
    p.add_argument("--k", type=int, choices=(2, 3), default=3)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("limit", help="limiting mean, variance and ratio limits")
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("series", help="f/g/h and p(n) tables")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("continuous", help="E3 at a real number of sides")
    p.add_argument("--x", type=_decimal, required=True)
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_continuous)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgumentError as exc:
        parser.print_usage(err)
        print(exc, file=err)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    started = time.perf_counter()
    try:
        results, extra, status = args.func(args)
    except (DomainError, PoleProximity) as exc:
        print(f"dicerun {args.command}: {exc}", file=err)
        return 1
    elapsed = (time.perf_counter() - started) * 1000.0

    if args.command == "series" and args.format == "csv":
        out.write(series_csv(results["rows"]))
        return status

    metadata = {
        "tool_version": __version__,
        "precision_bits": extra.get("precision_bits"),
        "rng": extra.get("rng"),
        "seed": extra.get("seed"),
        "wall_time_ms": round(elapsed, 3),
    }
    doc = {"command": args.command, "inputs": inputs, "results": results, "metadata": metadata}
    out.write(render(doc))
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
