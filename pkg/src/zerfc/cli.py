"""Command-line interface: ``zerfc {evaluate,table,coeffs,decay-scan}``.

Every number leaves the program as a decimal string with ``--digits``
significant figures, never through a binary float.

JSON schema of a report (``evaluate`` emits one object, ``table`` a list
under ``"rows"``)::

    {"t": str, "m": int, "K": int, "digits": int, "n_cutoff": int,
     "main_sum": str, "correction": str, "z_approx": str,
     "z_oracle": str | null, "abs_error": str | null,
     "hazard": bool, "hazard_distance": str}
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

import mpmath as mp

from . import coefficients as coef
from .evaluator import (
    M_MAX,
    EvaluationReport,
    HazardWarning,
    decay_scan,
    evaluate_grid,
    fit_loglog_slope,
)
from .precision import DomainError, check_digits, default_digits

EXIT_DOMAIN = 2
EXIT_HAZARD = 3

TABLE_MS = (2, 3, 4)
TABLE_KS = (10, 20, 30)
CSV_COLUMNS = ("m", "K", "main_sum", "correction", "z_approx", "z_oracle", "abs_error", "hazard")


def fmt(x, digits: int) -> str:
    """Decimal string with ``digits`` significant figures."""
    if x is None:
        return ""
    return mp.nstr(x, digits, strip_zeros=False, min_fixed=-4, max_fixed=digits)


def grouped(x, decimals: int = 17) -> str:
    """Fixed-point with the fractional digits in groups of five, sign always shown."""
    value = Decimal(mp.nstr(x, decimals + 10, min_fixed=-mp.inf, max_fixed=mp.inf))
    text = f"{abs(value).quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_EVEN):f}"
    whole, frac = text.split(".")
    groups = " ".join(frac[i : i + 5] for i in range(0, decimals, 5))
    return f"{'-' if value < 0 else '+'}{whole}.{groups}"


def report_to_dict(report: EvaluationReport) -> dict:
    d = report.digits
    return {
        "t": fmt(report.t, d),
        "m": report.m,
        "K": report.big_k,
        "digits": d,
        "n_cutoff": report.n_cutoff,
        "main_sum": fmt(report.main_sum, d),
        "correction": fmt(report.correction, d),
        "z_approx": fmt(report.z_approx, d),
        "z_oracle": fmt(report.z_oracle, d) if report.z_oracle is not None else None,
        "abs_error": fmt(report.abs_error, d) if report.abs_error is not None else None,
        "hazard": report.hazard_flag,
        "hazard_distance": fmt(report.hazard_distance, d),
    }


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [row["m"], row["K"], row["main_sum"], row["correction"], row["z_approx"],
             row["z_oracle"] or "", row["abs_error"] or "", str(row["hazard"]).lower()]
        )
    return buf.getvalue()


def _error_text(report: EvaluationReport) -> str:
    return mp.nstr(report.abs_error, 4, min_fixed=1, max_fixed=0) if report.abs_error is not None else "n/a"


def render_reports(reports: list[EvaluationReport], output_format: str) -> str:
    rows = [report_to_dict(r) for r in reports]
    if output_format == "json":
        payload = rows[0] if len(rows) == 1 else {"rows": rows}
        return json.dumps(payload, indent=2) + "\n"
    if output_format == "csv":
        return _csv_text(rows)
    first = reports[0]
    d = first.digits
    lines = [f"t = {fmt(first.t, d)}   N_t = {first.n_cutoff}"]
    if first.z_oracle is not None:
        lines.append(f"Z(t) (Euler-Maclaurin) = {fmt(first.z_oracle, d)}")
    if first.hazard_flag:
        lines.append(f"HAZARD: (t/2pi)^(1/2) is {fmt(first.hazard_distance, 3)} from an integer")
    if len(reports) == 1:
        r = first
        lines += [
            f"m = {r.m}   K = {r.big_k}",
            f"main sum   = {fmt(r.main_sum, d)}",
            f"correction = {fmt(r.correction, d)}",
            f"Z_approx   = {fmt(r.z_approx, d)}",
            f"|error|    = {_error_text(r)}",
        ]
        return "\n".join(lines) + "\n"
    for m in dict.fromkeys(r.m for r in reports):
        block = [r for r in reports if r.m == m]
        lines.append("")
        lines.append(f"m = {m}   Correction term = {grouped(block[0].correction)}")
        lines.append(f"{'K':>3}   {'Main Sum':<26}  |Z_approx - Z(t)|")
        for r in block:
            lines.append(f"{r.big_k:>3}   {grouped(r.main_sum):<26}  {_error_text(r)}")
    return "\n".join(lines) + "\n"


# -- coefficient dump -------------------------------------------------------------------


def _rational(x: Fraction) -> dict:
    return {"numerator": str(x.numerator), "denominator": str(x.denominator)}


def _poly(p: coef.TrigPoly) -> dict:
    terms = [
        {"coefficient": _rational(v), "cot": i, "csc": j, "eps": e}
        for (i, j, e), v in sorted(p.terms.items(), key=lambda kv: (-kv[0][2], -kv[0][0], kv[0][1]))
    ]
    return {"text": str(p), "terms": terms}


def coefficient_dump() -> dict:
    max_m = len(coef.ALPHA)
    return {
        "epsilon": coef.EPSILON_TEXT,
        "alpha": {str(r): [_rational(a) for a in row] for r, row in enumerate(coef.ALPHA)},
        "gamma": [_rational(g) for g in coef.GAMMA],
        "b": {f"{r},{k}": _poly(p) for (r, k), p in sorted(coef.B_TABLE.items(), key=lambda kv: (kv[0][1], kv[0][0]))},
        "d": {
            f"{r},{k}": _poly(p) for r in range(max_m) for k, p in enumerate(coef.d_coeffs(r))
        },
        "D": {
            f"{k},{m}": _poly(coef.d_listing(k, m))
            for m in range(1, max_m + 1)
            for k in range(2 * m - 1)
        },
    }


def _coeffs_text(dump: dict) -> str:
    def frac(d):
        return d["numerator"] if d["denominator"] == "1" else f"{d['numerator']}/{d['denominator']}"

    lines = [f"eps = {dump['epsilon']}", "", "alpha (row r lists W_r coefficients):"]
    for r, row in dump["alpha"].items():
        lines.append(f"  r={r}: " + ", ".join(frac(a) for a in row))
    lines.append("gamma: " + ", ".join(frac(g) for g in dump["gamma"]))
    for name in ("b", "d", "D"):
        lines.append("")
        lines.append(f"{name}:")
        for key, poly in dump[name].items():
            lines.append(f"  {name}({key}) = {poly['text']}")
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------------------


def _run_grid(args, ms, ks) -> tuple[str, bool]:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", HazardWarning)
        reports = evaluate_grid(args.t, ms, ks, digits=args.digits, with_oracle=args.oracle)
    hazard = any(issubclass(w.category, HazardWarning) for w in caught) or reports[0].hazard_flag
    return render_reports(reports, args.format), hazard


def cmd_evaluate(args) -> tuple[str, bool]:
    return _run_grid(args, [args.m], [args.k])


def cmd_table(args) -> tuple[str, bool]:
    return _run_grid(args, TABLE_MS, TABLE_KS)


def cmd_coeffs(args) -> tuple[str, bool]:
    dump = coefficient_dump()
    if args.format == "text":
        return _coeffs_text(dump), False
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("table", "index", "value"))
        for name in ("b", "d", "D"):
            for key, poly in dump[name].items():
                writer.writerow((name, key, poly["text"]))
        return buf.getvalue(), False
    return json.dumps(dump, indent=2) + "\n", False


def cmd_decay_scan(args) -> tuple[str, bool]:
    rows = decay_scan(args.t, args.m, args.k, digits=args.digits)
    fit = [(k, mag) for k, _, mag, _ in rows if k >= 5]
    slope = fit_loglog_slope([k for k, _ in fit], [mag for _, mag in fit]) if len(fit) >= 2 else None
    d = args.digits
    if args.format == "json":
        payload = {
            "t": args.t,
            "m": args.m,
            "rows": [{"K": k, "n": n, "term_magnitude": fmt(mag, d), "estimate": fmt(est, d)} for k, n, mag, est in rows],
            "fitted_slope_K_ge_5": None if slope is None else f"{slope:.4f}",
        }
        return json.dumps(payload, indent=2) + "\n", False
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("K", "n", "term_magnitude", "estimate"))
        for k, n, mag, est in rows:
            writer.writerow((k, n, fmt(mag, d), fmt(est, d)))
        return buf.getvalue(), False
    lines = [f"t = {args.t}   m = {args.m}", f"{'K':>3} {'n':>6}  {'|term|':<14}  estimate"]
    for k, n, mag, est in rows:
        lines.append(f"{k:>3} {n:>6}  {mp.nstr(mag, 6):<14}  {mp.nstr(est, 6)}")
    if slope is not None:
        lines.append(f"fitted slope over K >= 5: {slope:.3f}")
    return "\n".join(lines) + "\n", False


COMMANDS = {
    "evaluate": cmd_evaluate,
    "table": cmd_table,
    "coeffs": cmd_coeffs,
    "decay-scan": cmd_decay_scan,
}


def _m_value(text: str) -> int:
    m = int(text)
    if not 1 <= m <= M_MAX:
        raise argparse.ArgumentTypeError(f"m must be in 1..{M_MAX}")
    return m


def _digits_value(text: str) -> int:
    try:
        return check_digits(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError("K must be >= 1")
    return k


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=_digits_value, default=None,
                        help="working precision in decimal digits (20-100; env ZERFC_DIGITS, default 40)")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")

    parser = argparse.ArgumentParser(prog="zerfc", description="Z(t) from the erfc-smoothed Dirichlet series.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", parents=[common], help="evaluate Z_approx at one (t, m, K)")
    ev.add_argument("--t", required=True, help="height t as a decimal string")
    ev.add_argument("--m", type=_m_value, default=4)
    ev.add_argument("--k", type=_positive_int, default=30)

    tab = sub.add_parser("table", parents=[common], help="the m in {2,3,4} x K in {10,20,30} grid")
    tab.add_argument("--t", default="2600", help="height t (presets 2600 and 200000)")

    sub.add_parser("coeffs", parents=[common], help="dump alpha, gamma, b, d and D")

    sc = sub.add_parser("decay-scan", parents=[common], help="term magnitudes past the cutoff vs the estimate")
    sc.add_argument("--t", default="2600")
    sc.add_argument("--m", type=_m_value, default=4)
    sc.add_argument("--k", type=_positive_int, default=30, help="largest K")

    for p in (ev, tab):
        p.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=None,
                       help="compare against the Euler-Maclaurin Z(t) (default: on for t <= 1e6)")
        p.add_argument("--strict-hazard", action="store_true",
                       help="exit with status 3 when (t/2pi)^(1/2) is near an integer")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.digits is None:
            args.digits = default_digits()
    except ValueError as exc:
        parser.error(str(exc))
    try:
        text, hazard = COMMANDS[args.command](args)
    except (DomainError, ValueError) as exc:
        print(f"zerfc: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    sys.stdout.write(text)
    if hazard and getattr(args, "strict_hazard", False):
        print("zerfc: hazard: (t/2pi)^(1/2) is close to an integer", file=sys.stderr)
        return EXIT_HAZARD
    return 0


if __name__ == "__main__":
    sys.exit(main())
