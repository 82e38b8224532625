"""Special functions for the smoothed Dirichlet series.

Log-gamma and the Riemann-Siegel phase, the complex complementary error
function and its truncated-asymptotic form ``erfc(z; m)``, the transition
mapping eta(lambda), and the normalised incomplete gamma function Q(a, z) in
uniform-asymptotic and direct forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .coefficients import ALPHA, w_poly
from .precision import ConvergenceError, DomainError, bernoulli, eps, to_complex, to_real

CF_MAXITER = 200_000

# Below this |lambda - 1| the eta mapping switches to its Taylor series.
ETA_SERIES_RADIUS = 0.1
# erfc(z; m) is taken from the continued fraction of Gamma(1/2 - m, z^2) above this |z|.
ERFC_M_SWITCH = 3
# Below this |mu| the uniform expansion uses the regular coefficients c_k(eta).
Q_UNIFORM_MU_SWITCH = mp.mpf("1e-3")
C_SERIES_TERMS = 30


def _extra_digits(x) -> int:
    return int(mp.log10(abs(x) + 1)) + 5


def loggamma(z) -> mp.mpc:
    """Principal log Gamma(z) by the Stirling series with an upward shift.

    The argument is shifted to ``|z| >= 20 + dps/2`` so the truncated Stirling
    series reaches working precision.
    """
    z = to_complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
        raise DomainError(f"Gamma has a pole at {z}")
    dps = mp.mp.dps
    with mp.workdps(dps + _extra_digits(z)):
        threshold = 20 + dps / 2
        w = z
        shift = mp.mpc(0)
        while abs(w) < threshold:
            shift += mp.log(w)
            w += 1
        result = (w - 0.5) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
        tol = eps() * max(1, abs(result))
        w2 = w * w
        wpow = w
        prev = mp.inf
        for k in range(1, 400):
            b = bernoulli(2 * k)
            term = mp.mpf(b.numerator) / (b.denominator * 2 * k * (2 * k - 1)) / wpow
            if abs(term) > prev:
                raise ConvergenceError(f"Stirling series diverged at {z}")
            result += term
            if abs(term) < tol:
                break
            prev = abs(term)
            wpow *= w2
        else:
            raise ConvergenceError(f"Stirling series did not converge at {z}")
        result -= shift
    return +result


def theta(t) -> mp.mpf:
    """Riemann-Siegel phase arg Gamma(1/4 + it/2) - (t/2) log pi, continuous in t."""
    t = to_real(t)
    if t < 0:
        raise DomainError("theta is defined here for t >= 0")
    with mp.workdps(mp.mp.dps + _extra_digits(t)):
        value = loggamma(mp.mpc(0.25, t / 2)).imag - t * mp.log(mp.pi) / 2
    return +value


def _upper_gamma_cf(a, x, maxiter: int = CF_MAXITER):
    """Continued fraction h with Gamma(a, x) = exp(-x) x**a h (modified Lentz)."""
    tiny = mp.mpf(10) ** (-(mp.mp.dps * 3))
    tol = eps() * 4
    b = x + 1 - a
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, maxiter):
        an = -i * (i - a)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < tol:
            return h
    raise ConvergenceError(f"incomplete gamma continued fraction stalled at a={a}, x={x}")


def _erf_series(z):
    # Maclaurin series; caller supplies enough precision for the cancellation.
    z2 = z * z
    term = z
    total = z
    tol = eps()
    n = 0
    while True:
        n += 1
        term *= -z2 / n
        contrib = term / (2 * n + 1)
        total += contrib
        if abs(contrib) <= tol * abs(total):
            break
    return 2 * total / mp.sqrt(mp.pi)


def erfc_complex(z) -> mp.mpc:
    """Complementary error function of complex ``z``."""
    z = to_complex(z)
    if z == 0:
        return mp.mpc(1)
    if z.real < 0:
        return 2 - erfc_complex(-z)
    dps = mp.mp.dps
    if abs(z) >= 6 and abs(mp.arg(z)) <= 3 * mp.pi / 8:
        with mp.workdps(dps + 5):
            x = z * z
            value = mp.exp(-x) * z * _upper_gamma_cf(mp.mpf(0.5), x) / mp.sqrt(mp.pi)
        return +value
    extra = int(abs(z) ** 2 / math.log(10)) + 5
    with mp.workdps(dps + extra):
        value = 1 - _erf_series(z)
    return +value


def _asymptotic_head(z, m: int):
    # exp(-z^2)/sqrt(pi) * sum_{r<m} (-1)^r (1/2)_r z^(-2r-1)
    zinv2 = 1 / (z * z)
    term = 1 / z
    total = mp.mpc(0)
    for r in range(m):
        total += term
        term *= -(r + mp.mpf(0.5)) * zinv2
    return mp.exp(-z * z) * total / mp.sqrt(mp.pi)


def erfc_m(z, m: int) -> mp.mpc:
    """erfc z with the first ``m`` terms of its large-|z| expansion removed.

    Large arguments in the sector |arg z| <= 3pi/8 use the exact remainder
    (-1)^m (1/2)_m Gamma(1/2 - m, z^2)/sqrt(pi); elsewhere the subtraction is
    carried out at raised precision.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    z = to_complex(z)
    if z == 0:
        raise DomainError("erfc(z; m) is undefined at z = 0")
    if z.real < 0:
        return 2 - erfc_m(-z, m)
    dps = mp.mp.dps
    if abs(z) >= ERFC_M_SWITCH and abs(mp.arg(z)) <= 3 * mp.pi / 8:
        with mp.workdps(dps + 5):
            x = z * z
            a = mp.mpf(0.5) - m
            value = (-1) ** m * mp.rf(mp.mpf(0.5), m) * mp.exp(-x) * z ** (1 - 2 * m)
            value *= _upper_gamma_cf(a, x) / mp.sqrt(mp.pi)
        return +value
    loss = 2 * m * mp.log10(abs(z)) + max(0, -(z * z).real) / math.log(10)
    with mp.workdps(2 * dps + int(max(loss, 0)) + 5):
        value = erfc_complex(z) - _asymptotic_head(z, m)
    return +value


def eta_of_lambda(lam) -> mp.mpc:
    """Transition variable eta with eta^2/2 = lambda - 1 - log lambda.

    eta = (lambda - 1) g(lambda) with g the principal root of
    2(lambda - 1 - log lambda)/(lambda - 1)^2, so eta has the sign of
    lambda - 1 for real positive lambda.
    """
    lam = to_complex(lam)
    if lam.imag == 0 and lam.real <= 0:
        raise DomainError(f"lambda = {lam} lies on the branch cut of log")
    mu = lam - 1
    if mu == 0:
        return mp.mpc(0)
    if abs(mu) < ETA_SERIES_RADIUS:
        # 2(mu - log(1+mu))/mu^2 = sum_j (-1)^j 2 mu^j / (j+2)
        h = mp.mpc(1)
        term = mp.mpc(1)
        tol = eps()
        j = 0
        while True:
            j += 1
            term *= -mu
            contrib = 2 * term / (j + 2)
            h += contrib
            if abs(contrib) < tol:
                break
    else:
        with mp.workdps(mp.mp.dps + 10):
            h = 2 * (mu - mp.log(lam)) / (mu * mu)
    return mu * mp.sqrt(h)


@dataclass(frozen=True)
class TransitionPoint:
    n: int
    lambda_n: mp.mpc
    mu_n: mp.mpc
    eta_n: mp.mpc
    smoothing_arg: mp.mpc


def transition_point(n: int, s) -> TransitionPoint:
    """Per-term quantities for Q(s/2, pi n^2 i): lambda_n = 2 pi n^2 i / s."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    s = to_complex(s)
    lam = 2 * mp.pi * n * n * mp.j / s
    eta = eta_of_lambda(lam)
    return TransitionPoint(n, lam, lam - 1, eta, eta * mp.sqrt(s) / 2)


# -- regular coefficients c_k(eta) near the transition point -------------------------


def _ps_mul(a, b, size):
    out = [Fraction(0)] * size
    for i, ai in enumerate(a[:size]):
        if ai:
            for j, bj in enumerate(b[: size - i]):
                out[i + j] += ai * bj
    return out


def _ps_inv(a, size):
    out = [Fraction(0)] * size
    out[0] = 1 / a[0]
    for n in range(1, size):
        acc = sum((a[i] * out[n - i] for i in range(1, min(n, len(a) - 1) + 1)), Fraction(0))
        out[n] = -acc / a[0]
    return out


@lru_cache(maxsize=None)
def _mu_of_eta(size: int) -> tuple[Fraction, ...]:
    # mu mu' = eta (1 + mu), from d/deta of eta^2/2 = mu - log(1 + mu).
    m = [Fraction(0), Fraction(1)] + [Fraction(0)] * (size - 2)
    for n in range(2, size):
        acc = sum((Fraction(n + 1 - i) * m[i] * m[n + 1 - i] for i in range(2, n)), Fraction(0))
        m[n] = (m[n - 1] - acc) / (n + 1)
    return tuple(m)


@lru_cache(maxsize=None)
def c_series(k: int, nterms: int = C_SERIES_TERMS) -> tuple[Fraction, ...]:
    """Exact Taylor coefficients of c_k(eta) about eta = 0.

    c_k(eta) = (-1)^k W_k(mu)/mu^(2k+1) - (-2)^k (1/2)_k / eta^(2k+1) is regular
    at eta = 0; the singular parts cancel identically.
    """
    if not 0 <= k < len(ALPHA):
        raise ValueError(f"c_k is available for k = 0..{len(ALPHA) - 1}")
    order = 2 * k + 1
    size = order + nterms
    mu = _mu_of_eta(size + 1)
    u = list(mu[1 : size + 1])  # mu = eta * u(eta)
    uinv = _ps_inv(u, size)
    upow = [Fraction(1)] + [Fraction(0)] * (size - 1)
    for _ in range(order):
        upow = _ps_mul(upow, uinv, size)
    # W_k(mu(eta)) by Horner on truncated series.
    w = [Fraction(0)] * size
    for coef in reversed(ALPHA[k]):
        w = _ps_mul(w, list(mu[:size]), size)
        w[0] += coef
    bracket = _ps_mul(w, upow, size)
    bracket = [(-1) ** k * c for c in bracket]
    pochhammer = Fraction(1)
    for r in range(k):
        pochhammer *= Fraction(2 * r + 1, 2)
    bracket[0] -= (-2) ** k * pochhammer
    if any(bracket[:order]):
        raise AssertionError(f"singular part of c_{k} does not cancel; coefficient table is inconsistent")
    return tuple(bracket[order:])


def c_k(k: int, eta) -> mp.mpc:
    """c_k(eta) from its Taylor series; intended for |eta| well inside 1."""
    coeffs = c_series(k)
    eta = to_complex(eta)
    total = mp.mpc(0)
    for c in reversed(coeffs):
        total = total * eta + mp.mpf(c.numerator) / c.denominator
    return total


# -- incomplete gamma ---------------------------------------------------------------


def q_uniform(a, z, m: int) -> mp.mpc:
    """m-term uniform approximation of Q(a, z), remainder dropped."""
    if not 1 <= m <= len(ALPHA):
        raise ValueError(f"q_uniform supports m = 1..{len(ALPHA)}, got {m}")
    a = to_complex(a)
    z = to_complex(z)
    lam = z / a
    mu = lam - 1
    eta = eta_of_lambda(lam)
    zeta = eta * mp.sqrt(a / 2)
    prefactor = mp.exp(-zeta * zeta) / mp.sqrt(2 * mp.pi * a)
    if abs(mu) >= Q_UNIFORM_MU_SWITCH:
        series = sum(
            (-1) ** k * w_poly(k, mu) / mu ** (2 * k + 1) / a**k for k in range(m)
        )
        return erfc_m(zeta, m) / 2 + prefactor * series
    series = sum(c_k(k, eta) / a**k for k in range(m))
    return erfc_complex(zeta) / 2 + prefactor * series


def q_oracle(a, z) -> mp.mpc:
    """Q(a, z) by the lower power series or the Legendre continued fraction."""
    a = to_complex(a)
    z = to_complex(z)
    if z == 0:
        return mp.mpc(1)
    if abs(mp.arg(z)) >= 3 * mp.pi / 4:
        raise DomainError("q_oracle requires |arg z| < 3pi/4")
    dps = mp.mp.dps
    if abs(z) >= abs(a) + 1:
        with mp.workdps(dps + _extra_digits(a) + 5):
            value = mp.exp(a * mp.log(z) - z - loggamma(a)) * _upper_gamma_cf(a, z)
        return +value
    extra = _extra_digits(a) + 10
    while True:
        with mp.workdps(dps + extra):
            total = mp.mpc(1)
            term = mp.mpc(1)
            tol = eps()
            n = 0
            while True:
                n += 1
                term *= z / (a + n)
                total += term
                if abs(term) < tol * abs(total):
                    break
                if n > CF_MAXITER:
                    raise ConvergenceError(f"lower series for P({a}, {z}) did not converge")
            p = mp.exp(a * mp.log(z) - z - loggamma(a + 1)) * total
            q = 1 - p
            lost = int(mp.log10(max(1, abs(p)) / abs(q))) if q != 0 else dps + extra
        if lost <= extra - 10 or extra > 10 * dps:
            return +q
        extra = lost + 15
