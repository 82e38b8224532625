"""Z(t) from the erfc-smoothed Dirichlet series plus the T_m correction.

    Z(t) ~ Re e^{i theta} sum_n n^{-s} erfc(eta_n sqrt(s)/2; m)
           - Re e^{i theta} (1+i)^{-1} (pi e^{1/2}/omega)^s T_m(omega)

The first line is the *main sum* (truncated at n = N_t + K), the second the
*correction term*. The remainder is not estimated; accuracy is judged by
comparison with an independent evaluation of Z(t).
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import mpmath as mp

from . import special
from .coefficients import t_correction
from .precision import (
    DEFAULT_DIGITS,
    GUARD_DIGITS,
    ConvergenceError,
    DomainError,
    omega_of_s,
    to_real,
    working_precision,
)

logger = logging.getLogger(__name__)

HAZARD_THRESHOLD = mp.mpf("0.05")
ORACLE_T_LIMIT = 10**6
M_MAX = 4


class HazardWarning(RuntimeWarning):
    """(t/2pi)^{1/2} is close to an integer; csc(omega) and one term are large."""


@dataclass(frozen=True)
class ExpansionParams:
    t: mp.mpf
    s: mp.mpc
    omega: mp.mpc
    n_cutoff: int
    theta_t: mp.mpf
    hazard_distance: mp.mpf

    @property
    def hazard(self) -> bool:
        return self.hazard_distance < HAZARD_THRESHOLD


@dataclass
class EvaluationReport:
    t: mp.mpf
    m: int
    big_k: int
    digits: int
    n_cutoff: int
    main_sum: mp.mpf
    correction: mp.mpf
    z_approx: mp.mpf
    z_oracle: Optional[mp.mpf] = None
    abs_error: Optional[mp.mpf] = None
    per_term_magnitudes: list = field(default_factory=list)
    hazard_flag: bool = False
    hazard_distance: Optional[mp.mpf] = None


def _sqrt_t_over_2pi(t):
    return mp.sqrt(t / (2 * mp.pi))


def cutoff(t) -> int:
    """Riemann-Siegel cutoff N_t = floor((t/2pi)^{1/2})."""
    t = to_real(t)
    if t <= 2 * mp.pi:
        raise DomainError(f"t = {t} <= 2 pi gives N_t = 0; the expansion needs N_t >= 1")
    x = _sqrt_t_over_2pi(t)
    n = int(mp.nint(x))
    # An exact square such as t = 8 pi must not fall to the integer below.
    if abs(x - n) <= mp.mpf(10) ** (-(mp.mp.dps - 5)) * n:
        return n
    return int(mp.floor(x))


def expansion_params(t) -> ExpansionParams:
    t = to_real(t)
    n = cutoff(t)
    s = mp.mpc(mp.mpf(1) / 2, t)
    x = _sqrt_t_over_2pi(t)
    return ExpansionParams(
        t=t,
        s=s,
        omega=omega_of_s(s),
        n_cutoff=n,
        theta_t=special.theta(t),
        hazard_distance=abs(x - mp.nint(x)),
    )


def smoothed_term(params: ExpansionParams, n: int, m: int) -> mp.mpc:
    """n^{-s} erfc(eta_n sqrt(s)/2; m).

    For n <= N_t the argument lies in the left half-plane and erfc_m evaluates
    it as 2 - erfc(-z; m).
    """
    tp = special.transition_point(n, params.s)
    return mp.exp(-params.s * mp.log(n)) * special.erfc_m(tp.smoothing_arg, m)


def _terms(params: ExpansionParams, m: int, n_stop: int) -> list:
    return [smoothed_term(params, n, m) for n in range(1, n_stop + 1)]


def _main_sum_from_terms(params: ExpansionParams, terms) -> mp.mpf:
    # Fixed left-to-right order keeps results bit-reproducible.
    total = mp.mpc(0)
    for term in terms:
        total += term
    return (mp.expj(params.theta_t) * total).real


def _check_m(m: int):
    if not 1 <= m <= M_MAX:
        raise ValueError(f"m must be in 1..{M_MAX}, got {m}")


def main_sum(params: ExpansionParams, m: int, big_k: int) -> mp.mpf:
    """Real part of e^{i theta} times the smoothed sum over n = 1 .. N_t + K."""
    _check_m(m)
    if big_k < 1:
        raise ValueError("K must be >= 1")
    return _main_sum_from_terms(params, _terms(params, m, params.n_cutoff + big_k))


def correction_term(params: ExpansionParams, m: int) -> mp.mpf:
    """Re e^{i theta}/sqrt(2i) (pi e^{1/2}/omega)^s T_m(omega)."""
    _check_m(m)
    s, omega = params.s, params.omega
    power = mp.exp(s * (mp.log(mp.pi) + mp.mpf(1) / 2 - mp.log(omega)))
    value = mp.expj(params.theta_t) / mp.mpc(1, 1) * power * t_correction(m, omega)
    return value.real


def correction_term_single_re(params: ExpansionParams, m: int, big_k: int) -> mp.mpf:
    """Main sum minus correction taken inside a single real part."""
    s, omega = params.s, params.omega
    total = mp.mpc(0)
    for term in _terms(params, m, params.n_cutoff + big_k):
        total += term
    power = mp.exp(s * (mp.log(mp.pi) + mp.mpf(1) / 2 - mp.log(omega)))
    total -= power * t_correction(m, omega) / mp.mpc(1, 1)
    return (mp.expj(params.theta_t) * total).real


def _guard_digits(params: ExpansionParams) -> int:
    # Near the hazard csc(omega) is large and main sum and correction cancel.
    csc = abs(1 / mp.sin(params.omega))
    return GUARD_DIGITS + max(0, int(mp.log10(csc)))


def decay_estimate(t, m: int, big_k: int) -> mp.mpf:
    """Order-of-magnitude size (4 pi K^2)^{-m-1/2} (t/2pi)^{-1/4} of term N_t + K."""
    t = to_real(t)
    return (4 * mp.pi * big_k**2) ** (-m - mp.mpf(1) / 2) * (t / (2 * mp.pi)) ** (-mp.mpf(1) / 4)


def term_magnitudes(params: ExpansionParams, m: int, big_k: int) -> list:
    """|n^{-s} erfc(eta_n sqrt(s)/2; m)| for n = N_t + 1 .. N_t + K."""
    n0 = params.n_cutoff
    return [abs(smoothed_term(params, n0 + k, m)) for k in range(1, big_k + 1)]


def evaluate_grid(t, ms, ks, digits: int = DEFAULT_DIGITS, with_oracle: Optional[bool] = None):
    """Reports for every (m, K) pair, sharing the smoothed terms across K."""
    ms = list(ms)
    ks = sorted(ks)
    for m in ms:
        _check_m(m)
    if not ks or ks[0] < 1:
        raise ValueError("K must be >= 1")
    with working_precision(digits):
        params = expansion_params(t)
    guard = _guard_digits(params)
    if params.hazard:
        warnings.warn(
            f"(t/2pi)^(1/2) is within {mp.nstr(params.hazard_distance, 3)} of an integer; "
            "terms near the transition point are large",
            HazardWarning,
            stacklevel=2,
        )
    if with_oracle is None:
        with_oracle = params.t <= ORACLE_T_LIMIT
    reports = []
    with working_precision(digits, guard):
        params = expansion_params(t)
        z_oracle = None
        if with_oracle:
            from .oracle import euler_maclaurin_z

            z_oracle = euler_maclaurin_z(params.t)
        n0 = params.n_cutoff
        for m in ms:
            correction = correction_term(params, m)
            terms = _terms(params, m, n0 + ks[-1])
            for big_k in ks:
                main = _main_sum_from_terms(params, terms[: n0 + big_k])
                z_approx = main - correction
                report = EvaluationReport(
                    t=params.t,
                    m=m,
                    big_k=big_k,
                    digits=digits,
                    n_cutoff=n0,
                    main_sum=main,
                    correction=correction,
                    z_approx=z_approx,
                    z_oracle=z_oracle,
                    abs_error=abs(z_approx - z_oracle) if z_oracle is not None else None,
                    per_term_magnitudes=[abs(x) for x in terms[n0 : n0 + big_k]],
                    hazard_flag=params.hazard,
                    hazard_distance=params.hazard_distance,
                )
                reports.append(report)
    logger.debug("evaluated %d grid points at t=%s", len(reports), t)
    return reports


def evaluate(t, m: int, big_k: int, digits: int = DEFAULT_DIGITS, with_oracle: Optional[bool] = None) -> EvaluationReport:
    """Z(t) approximation with m correction orders and K terms past the cutoff.

    ``with_oracle`` defaults to on for t <= 10^6. A hazard (distance of
    (t/2pi)^{1/2} to the nearest integer below 0.05) emits
    :class:`HazardWarning` and sets ``hazard_flag``; it is not an error.
    """
    return evaluate_grid(t, [m], [big_k], digits=digits, with_oracle=with_oracle)[0]


def reference_gamma_path(t, n_max: int = 500, tol=None, averaging_levels: int = 8) -> mp.mpf:
    """Z(t) from the exact incomplete-gamma representation.

        Z(t) = 2 Re e^{i theta} { sum_n n^{-s} Q(s/2, pi n^2 i)
                                  - pi^{s/2} e^{pi i s/4} / (s Gamma(s/2)) }

    Late terms behave like (-1)^n/n^2 with a smooth amplitude, so the partial
    sums are accelerated by repeated averaging of the last ``averaging_levels``
    partial sums. Raises :class:`ConvergenceError` when the change between the
    last two averaging levels exceeds ``tol``.
    """
    t = to_real(t)
    if t <= 0:
        raise DomainError("t must be positive")
    if n_max <= averaging_levels:
        raise ValueError("n_max must exceed the number of averaging levels")
    s = mp.mpc(mp.mpf(1) / 2, t)
    a = s / 2
    partial = mp.mpc(0)
    partials = []
    for n in range(1, n_max + 1):
        partial += mp.exp(-s * mp.log(n)) * special.q_oracle(a, mp.pi * n * n * mp.j)
        if n >= n_max - averaging_levels:
            partials.append(partial)
    levels = [partials]
    while len(levels[-1]) > 1:
        prev = levels[-1]
        levels.append([(x + y) / 2 for x, y in zip(prev, prev[1:])])
    accelerated = levels[-1][0]
    change = abs(accelerated - levels[-2][0])
    if tol is None:
        tol = mp.mpf(10) ** (-(mp.mp.dps - GUARD_DIGITS) // 2)
    if change > tol:
        raise ConvergenceError(f"tail not converged: last averaging step changed the sum by {mp.nstr(change, 3)}")
    extra = mp.exp(s / 2 * mp.log(mp.pi) + mp.pi * mp.j * s / 4 - mp.log(s) - special.loggamma(a))
    return 2 * (mp.expj(special.theta(t)) * (accelerated - extra)).real


def raw_gamma_partial_sums(t, n_values) -> dict:
    """Unaccelerated partial sums of the incomplete-gamma representation, keyed by n."""
    t = to_real(t)
    s = mp.mpc(mp.mpf(1) / 2, t)
    a = s / 2
    wanted = set(n_values)
    partial = mp.mpc(0)
    out = {}
    for n in range(1, max(wanted) + 1):
        partial += mp.exp(-s * mp.log(n)) * special.q_oracle(a, mp.pi * n * n * mp.j)
        if n in wanted:
            out[n] = partial
    return out


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx = [math.log(float(x)) for x in xs]
    ly = [math.log(float(y)) for y in ys]
    n = len(lx)
    mx = sum(lx) / n
    my = sum(ly) / n
    sxx = sum((x - mx) ** 2 for x in lx)
    sxy = sum((x - mx) * (y - my) for x, y in zip(lx, ly))
    return sxy / sxx


def decay_scan(t, m: int, k_max: int = 30, digits: int = DEFAULT_DIGITS) -> list[tuple[int, int, mp.mpf, mp.mpf]]:
    """Rows (K, n, |term n|, estimate) for n = N_t + K, K = 1..k_max."""
    _check_m(m)
    with working_precision(digits):
        params = expansion_params(t)
        mags = term_magnitudes(params, m, k_max)
        return [
            (k, params.n_cutoff + k, +mag, +decay_estimate(params.t, m, k))
            for k, mag in zip(range(1, k_max + 1), mags)
        ]
