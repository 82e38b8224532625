"""Acceptance criteria 1-9.

Each criterion records one PASS/FAIL line, printed in the terminal summary
at its stated tolerance. Run alone with ``pytest tests/test_acceptance.py``.
"""

from __future__ import annotations

import time
from fractions import Fraction

import mpmath as mp
import pytest

from zerfc import coefficients as coef
from zerfc.cli import grouped
from zerfc.evaluator import decay_scan, evaluate_grid, fit_loglog_slope, reference_gamma_path
from zerfc.oracle import euler_maclaurin_z, q_quadrature, s_direct_sum
from zerfc.precision import omega_of_s
from zerfc.special import q_uniform

from listings import D_LISTED

DIGITS = 40
MS = (2, 3, 4)
KS = (10, 20, 30)

# Printed tables: correction per m, then (main sum, |Z_approx - Z|) per K.
TABLE_1 = {
    "t": 2600,
    "n_cutoff": 20,
    "z": "-0.63210232",
    "correction": {2: "+0.17012 33165 89694 33", 3: "+0.08577 29470 58489 99", 4: "-0.53258 74830 13204 32"},
    "rows": {
        (2, 10): ("-0.46197 90063 18404 31", "2.269e-08"),
        (2, 20): ("-0.46197 90041 44898 25", "9.502e-11"),
        (2, 30): ("-0.46197 90040 66916 27", "1.704e-11"),
        (3, 10): ("-0.54632 93736 04227 97", "2.315e-11"),
        (3, 20): ("-0.54632 93735 81347 73", "2.693e-13"),
        (3, 30): ("-0.54632 93735 81099 88", "2.146e-14"),
        (4, 10): ("-1.16468 98036 52714 66", "5.792e-14"),
        (4, 20): ("-1.16468 98036 52772 40", "1.874e-16"),
        (4, 30): ("-1.16468 98036 52772 58", "6.799e-18"),
    },
}

TABLE_2 = {
    "t": 200000,
    "n_cutoff": 178,
    "z": "-3.51142011",
    "correction": {2: "+0.04418 05095 82215 20", 3: "+0.03215 07834 37290 07", 4: "-0.03047 11685 29774 29"},
    "rows": {
        (2, 10): ("-3.46723 96042 56646 04", "5.980e-10"),
        (2, 20): ("-3.46723 96036 78939 00", "2.032e-11"),
        (2, 30): ("-3.46723 96036 61437 02", "2.815e-12"),
        (3, 10): ("-3.47926 93298 09067 88", "5.521e-12"),
        (3, 20): ("-3.47926 93298 03596 26", "4.958e-14"),
        (3, 30): ("-3.47926 93298 03549 81", "3.130e-15"),
        (4, 10): ("-3.54189 12817 70598 54", "1.251e-14"),
        (4, 20): ("-3.54189 12817 70611 02", "2.921e-17"),
        (4, 30): ("-3.54189 12817 70611 04", "8.377e-19"),
    },
}

# Two printed entries of the first table disagree with the table itself and
# are kept as known failures (strict xfail), not adjusted:
#  - error (m=2, K=10) is printed 2.269e-08; its printed main sum, correction
#    and Z(t) give 2.2685e-09.
#  - correction m=3 is printed ...58489 99; the computed ...58489 85 is stable
#    from 40 to 90 digits, and only it reproduces the printed m=3 errors
#    (with ...99 they would read 2.6945e-13 and 2.160e-14).
KNOWN_ERROR_MISPRINTS = {(2600, 2, 10)}
KNOWN_CORRECTION_MISPRINTS = {(2600, 3)}

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str):
    RESULTS[n] = (ok, detail)


@pytest.fixture(scope="module", autouse=True)
def acceptance_summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    lines = ["", "acceptance criteria:"]
    for n in range(1, 10):
        ok, detail = RESULTS.get(n, (False, "not run"))
        lines.append(f"  [{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    text = "\n".join(lines)
    if reporter is not None:
        reporter.write_line(text)
    else:
        print(text)


def _run_table(table):
    start = time.perf_counter()
    with mp.workdps(DIGITS):
        reports = evaluate_grid(table["t"], MS, KS, digits=DIGITS, with_oracle=True)
    elapsed = time.perf_counter() - start
    return {(r.m, r.big_k): r for r in reports}, elapsed


@pytest.fixture(scope="module")
def table_1():
    return _run_table(TABLE_1)


@pytest.fixture(scope="module")
def table_2():
    return _run_table(TABLE_2)


def _check_table(table, computed, elapsed, budget):
    reports = computed
    digit_misses = []
    error_misses = []
    for (m, k), (main_printed, err_printed) in table["rows"].items():
        r = reports[m, k]
        if grouped(r.main_sum) != main_printed:
            digit_misses.append(f"main(m={m},K={k})")
        ratio = r.abs_error / mp.mpf(err_printed)
        if not mp.mpf(1) / 2 <= ratio <= 2:
            error_misses.append((m, k, err_printed, mp.nstr(r.abs_error, 4)))
    for m in MS:
        r = reports[m, KS[0]]
        if grouped(r.correction) != table["correction"][m]:
            digit_misses.append(f"correction m={m} printed {table['correction'][m]} computed {grouped(r.correction)}")
    n_ok = r.n_cutoff == table["n_cutoff"]
    return digit_misses, error_misses, n_ok, elapsed <= budget


def _table_detail(table, result, elapsed, budget):
    digit_misses, error_misses, n_ok, fast = result
    parts = [
        f"t={table['t']}: main sums and corrections {'all digits match' if not digit_misses else 'mismatch ' + ', '.join(digit_misses)}",
        f"errors within x2 in {9 - len(error_misses)}/9",
    ]
    for m, k, printed, got in error_misses:
        parts.append(f"(m={m},K={k}) printed {printed} computed {got}")
    parts.append(f"N_t {'ok' if n_ok else 'WRONG'}")
    parts.append(f"{elapsed:.1f}s (budget {budget}s)")
    return "; ".join(parts)


def _error_params(table):
    out = []
    for m, k in table["rows"]:
        marks = ()
        if (table["t"], m, k) in KNOWN_ERROR_MISPRINTS:
            marks = pytest.mark.xfail(strict=True, reason="printed error exponent is off by a factor of 10")
        out.append(pytest.param(m, k, marks=marks, id=f"m{m}-K{k}"))
    return out


def _correction_params(table):
    out = []
    for m in MS:
        marks = ()
        if (table["t"], m) in KNOWN_CORRECTION_MISPRINTS:
            marks = pytest.mark.xfail(strict=True, reason="printed correction disagrees with the printed errors")
        out.append(pytest.param(m, marks=marks, id=f"m{m}"))
    return out


# -- 1 ---------------------------------------------------------------------------------


def test_criterion_1_summary(table_1):
    computed, elapsed = table_1
    result = _check_table(TABLE_1, computed, elapsed, budget=10)
    digit_misses, error_misses, n_ok, fast = result
    ok = not digit_misses and not error_misses and n_ok and fast
    record(1, ok, _table_detail(TABLE_1, result, elapsed, 10))
    # per-cell checks below carry the pass/fail verdict for each printed number
    assert n_ok and fast


@pytest.mark.parametrize("m, k", list(TABLE_1["rows"]), ids=lambda v: str(v))
def test_criterion_1_main_sum_cell(table_1, m, k):
    assert grouped(table_1[0][m, k].main_sum) == TABLE_1["rows"][m, k][0]


@pytest.mark.parametrize("m", _correction_params(TABLE_1))
def test_criterion_1_correction(table_1, m):
    assert grouped(table_1[0][m, 10].correction) == TABLE_1["correction"][m]


def test_criterion_1_correction_misprint_is_internal(table_1):
    z = table_1[0][3, 10].z_oracle
    printed = mp.mpf(TABLE_1["correction"][3].replace(" ", ""))
    computed = table_1[0][3, 10].correction
    for k, (main, err) in TABLE_1["rows"].items():
        if k[0] != 3 or k[1] == 10:
            continue
        main = mp.mpf(main.replace(" ", ""))
        assert mp.nstr(abs(main - computed - z), 4) == mp.nstr(mp.mpf(err), 4)
        assert mp.nstr(abs(main - printed - z), 4) != mp.nstr(mp.mpf(err), 4)


@pytest.mark.parametrize("m, k", _error_params(TABLE_1))
def test_criterion_1_error_cell(table_1, m, k):
    computed, _ = table_1
    ratio = computed[m, k].abs_error / mp.mpf(TABLE_1["rows"][m, k][1])
    assert mp.mpf(1) / 2 <= ratio <= 2


def test_criterion_1_misprint_is_internal(table_1):
    # The printed digits alone reproduce the computed error for the misprinted cell.
    main = mp.mpf(TABLE_1["rows"][2, 10][0].replace(" ", ""))
    corr = mp.mpf(TABLE_1["correction"][2].replace(" ", ""))
    z = table_1[0][2, 10].z_oracle
    from_print = abs(main - corr - z)
    assert abs(from_print / mp.mpf("2.269e-9") - 1) < 1e-3


# -- 2 ---------------------------------------------------------------------------------


def test_criterion_2(table_2):
    computed, elapsed = table_2
    result = _check_table(TABLE_2, computed, elapsed, budget=120)
    digit_misses, error_misses, n_ok, fast = result
    ok = not digit_misses and not error_misses and n_ok and fast
    record(2, ok, _table_detail(TABLE_2, result, elapsed, 120))
    assert ok


# -- 3 ---------------------------------------------------------------------------------


def test_criterion_3():
    with mp.workdps(DIGITS):
        ref = reference_gamma_path(2600, n_max=500)
        em = euler_maclaurin_z(2600)
    diff = abs(ref - em)
    digits_ok = mp.nstr(ref, 8) == TABLE_1["z"] and mp.nstr(em, 8) == TABLE_1["z"]
    ok = diff < 1e-12 and digits_ok
    record(3, ok, f"|reference - Euler-Maclaurin| = {mp.nstr(diff, 3)} (tol 1e-12); both {mp.nstr(em, 8)}")
    assert ok


# -- 4 ---------------------------------------------------------------------------------


def test_criterion_4():
    regenerated = coef.b_coeffs_generate(6)
    b_ok = regenerated == dict(coef.B_TABLE)
    d_bad = [key for key, poly in D_LISTED.items() if coef.d_listing(*key) != poly]
    d32 = not coef.d_coeffs(3)[2]
    d64 = str(coef.d_listing(6, 4)) == "1003/6480 eps^3"
    ok = b_ok and not d_bad and d32 and d64
    record(
        4,
        ok,
        f"b table {'identical' if b_ok else 'DIFFERS'} (28 entries); D_k(m) listings "
        f"{'identical' if not d_bad else 'differ at ' + str(d_bad)} ({len(D_LISTED)} entries); "
        f"D_6(4) = {coef.d_listing(6, 4)}; d_(3,2) {'= 0' if d32 else '!= 0'}",
    )
    assert ok


# -- 5 ---------------------------------------------------------------------------------


def test_criterion_5():
    worst = mp.mpf(0)
    with mp.workdps(DIGITS):
        tol = mp.mpf(10) ** -(DIGITS - 5)
        for t in (100, 2600, 200000):
            w = omega_of_s(mp.mpc(0.5, t))
            for m in range(1, 5):
                via_d = coef.t_correction(m, w, "D")
                via_s = coef.t_correction(m, w, "S")
                worst = max(worst, abs(via_d - via_s) / abs(via_s))
    ok = worst < tol
    record(5, ok, f"max relative |T_m(D) - T_m(S)| = {mp.nstr(worst, 3)} (tol 1e-{DIGITS - 5})")
    assert ok


# -- 6 ---------------------------------------------------------------------------------


def test_criterion_6():
    omegas = [mp.mpc(1, 0.1), mp.mpc(2.5, -0.3), mp.mpc(10.2, -0.01), mp.mpc(40, 0.5)]
    with mp.workdps(DIGITS):
        omegas.append(omega_of_s(mp.mpc(0.5, 2600)))
        worst_rec = mp.mpf(0)
        worst_ratio = mp.mpf(0)
        for w in omegas:
            for k in range(1, 5):
                closed = coef.s_func(k, w)
                rec = coef.s_recurrence(k, w)
                direct, radius = s_direct_sum(k, w, n_max=4000)
                worst_rec = max(worst_rec, abs(rec - closed) / abs(closed))
                worst_ratio = max(worst_ratio, abs(direct - closed) / (radius + mp.mpf(10) ** -(DIGITS - 5)))
    ok = worst_rec < mp.mpf(10) ** -(DIGITS - 5) and worst_ratio <= 1
    record(
        6,
        ok,
        f"recurrence vs closed form max rel {mp.nstr(worst_rec, 3)}; "
        f"direct sum within certified radius (max |diff|/radius = {mp.nstr(worst_ratio, 3)}) at 5 omega, k=1..4",
    )
    assert ok


# -- 7 ---------------------------------------------------------------------------------


def test_criterion_7():
    # The error is measured relative to Q: at fixed lambda = 2 both Q and the
    # absolute error carry the factor exp(-a eta^2/2), which would swamp the
    # algebraic order in a log-log fit.
    sizes = [16 * 2**j for j in range(6)]
    slopes = {}
    with mp.workdps(DIGITS):
        for m in (1, 2, 3):
            errs = []
            for a in sizes:
                a = mp.mpf(a)
                exact = q_quadrature(a, 2 * a)
                errs.append(abs(q_uniform(a, 2 * a, m) - exact) / abs(exact))
            slopes[m] = fit_loglog_slope(sizes, errs)
    ok = all(abs(slopes[m] + m) <= 0.3 for m in slopes)
    text = ", ".join(f"m={m}: {slopes[m]:.3f}" for m in slopes)
    record(7, ok, f"log-log slopes of relative error, a = 16..512, lambda = 2: {text} (target -m +- 0.3)")
    assert ok


# -- 8 ---------------------------------------------------------------------------------


def test_criterion_8():
    checks = [coef.w_poly(r, Fraction(-1)) == (-1) ** r * coef.GAMMA[r] for r in range(4)]
    ok = all(checks)
    record(8, ok, "W_r(-1) = (-1)^r gamma_r exactly for r = 0..3" if ok else f"failures at r = {[r for r, c in enumerate(checks) if not c]}")
    assert ok


# -- 9 ---------------------------------------------------------------------------------


def test_criterion_9():
    slopes = {}
    for m in (2, 3, 4):
        rows = decay_scan(2600, m, 30, digits=DIGITS)
        fit = [(k, mag) for k, _, mag, _ in rows if k >= 5]
        slopes[m] = fit_loglog_slope([k for k, _ in fit], [g for _, g in fit])
    ok = all(abs(slopes[m] + 2 * m + 0.5) <= 0.5 for m in slopes)
    text = ", ".join(f"m={m}: {slopes[m]:.3f} (target {-(2 * m + 0.5)})" for m in slopes)
    record(9, ok, f"term decay slopes over K = 5..30 at t = 2600: {text}")
    assert ok
