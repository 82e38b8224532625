"""Independent reference computations.

None of these routines use the uniform asymptotics or the cot/csc coefficient
tables; they exist to check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath as mp

from .coefficients import w_poly
from .precision import ConvergenceError, DomainError, bernoulli, omega_of_s, to_complex, to_real
from .special import theta


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for :func:`euler_maclaurin_z`.

    ``euler_maclaurin_terms`` defaults to max(50, ceil(t)); the Bernoulli
    correction then shrinks by roughly (2 pi)^-2 per order.
    """

    target_digits: Optional[int] = None
    euler_maclaurin_terms: Optional[int] = None
    bernoulli_order: int = 120
    tail_tolerance: Optional[mp.mpf] = None

    def resolved_target(self) -> int:
        target = self.target_digits if self.target_digits is not None else mp.mp.dps - 5
        if target > mp.mp.dps - 5:
            raise ValueError(f"target_digits={target} exceeds working precision - 5 = {mp.mp.dps - 5}")
        return target


def _smallest_prime_factors(n: int) -> list[int]:
    spf = list(range(n + 1))
    for p in range(2, int(n**0.5) + 1):
        if spf[p] == p:
            for q in range(p * p, n + 1, p):
                if spf[q] == q:
                    spf[q] = p
    return spf


def _dirichlet_powers(s, n_max: int) -> list:
    # n^{-s} is completely multiplicative: one exp per prime, one product otherwise.
    spf = _smallest_prime_factors(n_max)
    values = [mp.mpc(0), mp.mpc(1)] + [None] * (n_max - 1)
    for n in range(2, n_max + 1):
        p = spf[n]
        if p == n:
            values[n] = mp.exp(-s * mp.log(n))
        else:
            values[n] = values[p] * values[n // p]
    return values


def zeta_em(s, config: OracleConfig = OracleConfig(), n_terms: Optional[int] = None) -> mp.mpc:
    """zeta(s) by Euler-Maclaurin summation with exact Bernoulli numbers."""
    s = to_complex(s)
    if s == 1:
        raise DomainError("zeta has a pole at s = 1")
    target = config.resolved_target()
    n = n_terms or config.euler_maclaurin_terms or max(50, math.ceil(abs(s.imag)))
    with mp.workdps(mp.mp.dps + int(math.log10(n)) + 5):
        tol = config.tail_tolerance or mp.mpf(10) ** (-(target + 3))
        powers = _dirichlet_powers(s, n)
        total = mp.mpc(0)
        for v in powers[1:n]:
            total += v
        n_pow = powers[n]  # N^{-s}
        total += n * n_pow / (s - 1) + n_pow / 2
        rising = s  # s (s+1) ... (s+2k-2)
        factor = n_pow / n  # N^{-s-1}
        fact = mp.mpf(2)  # (2k)!
        prev = mp.inf
        for k in range(1, config.bernoulli_order + 1):
            b = bernoulli(2 * k)
            term = mp.mpf(b.numerator) / b.denominator / fact * rising * factor
            total += term
            if abs(term) < tol:
                break
            if abs(term) > prev:
                raise ConvergenceError("Euler-Maclaurin tail diverges; increase the number of direct terms")
            prev = abs(term)
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            factor /= n * n
            fact *= (2 * k + 1) * (2 * k + 2)
        else:
            raise ConvergenceError("Bernoulli correction did not reach the target precision")
    return +total


def euler_maclaurin_z(t, config: OracleConfig = OracleConfig()) -> mp.mpf:
    """Z(t) = Re e^{i theta(t)} zeta(1/2 + it) with zeta by Euler-Maclaurin."""
    t = to_real(t)
    if t <= 0:
        raise DomainError("t must be positive")
    with mp.workdps(mp.mp.dps + int(mp.log10(t + 1)) + 3):
        zeta = zeta_em(mp.mpc(mp.mpf(1) / 2, t), config)
        value = (mp.expj(theta(t)) * zeta).real
    return +value


def s_direct_sum(k: int, omega, n_max: int = 10**4):
    """Bilateral sum 2^{k-1} sum_n (-1)^n omega^k / (omega^2 - (pi n)^2)^k.

    Returns ``(value, radius)``: the symmetric partial sum over |n| <= n_max
    and a rigorous bound on the omitted tail, obtained by pairing consecutive
    terms and bounding each difference by the derivative of the summand.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if n_max < 1000:
        raise ValueError("n_max must be at least 1000")
    omega = to_complex(omega)
    nearest = mp.nint(omega.real / mp.pi)
    if abs(omega - nearest * mp.pi) < mp.mpf("1e-6"):
        raise DomainError("omega is within 1e-6 of a pole at pi*n")
    if (n_max + 1) * mp.pi < 2 * abs(omega):
        raise ConvergenceError("n_max too small for the tail bound: need n_max + 1 >= 2|omega|/pi")
    w2 = omega * omega
    wk = omega**k
    pi2 = mp.pi**2
    total = mp.mpc(0)
    for n in range(n_max, 0, -1):
        term = wk / (w2 - pi2 * n * n) ** k
        total += term if n % 2 == 0 else -term
    total = 2 * total + wk / w2**k
    x = mp.mpf(n_max + 1)
    g = 2 * k * abs(omega) ** k * (mp.mpf(4) / 3) ** (k + 1) / mp.pi ** (2 * k)
    tail = g / x ** (2 * k + 1) + g / (2 * (2 * k) * x ** (2 * k))
    scale = mp.mpf(2) ** (k - 1)
    return scale * total, scale * 2 * tail


def a_coeff_direct_sum(r: int, s, n_max: int = 10**4):
    """A_r(s) = sum_n (-1)^(n-1) W_r(mu_n)/mu_n^(2r+1), mu_n = (pi n/omega)^2 - 1.

    Returns ``(value, radius)`` where the radius is twice the magnitude of the
    first omitted pair term (alternating-series estimate).
    """
    omega = omega_of_s(s)

    def f(n):
        mu = (mp.pi * n / omega) ** 2 - 1
        return w_poly(r, mu) / mu ** (2 * r + 1)

    total = mp.mpc(0)
    for n in range(n_max, 0, -1):
        total += f(n) if n % 2 == 1 else -f(n)
    total = 2 * total - f(0)
    return total, 2 * 2 * abs(f(n_max + 1))


def q_quadrature(a, z) -> mp.mpc:
    """Q(a, z) = Gamma(a, z)/Gamma(a) by numerical integration.

    The path is the ray u = z + x e^{i phi}, x >= 0, with phi = arg(a)/2 so the
    integrand decays through the saddle at u ~ a when z is near a.
    """
    a = to_complex(a)
    z = to_complex(z)
    if abs(mp.arg(z)) >= 3 * mp.pi / 4:
        raise DomainError("q_quadrature requires |arg z| < 3pi/4")
    if abs(a) > 10**4:
        raise DomainError("q_quadrature is limited to |a| <= 1e4")
    dps = mp.mp.dps
    with mp.workdps(dps + int(mp.log10(abs(a) + 1)) + 10):
        direction = mp.expj(mp.arg(a) / 2)
        # Normalise by the integrand at the endpoint; quad's tolerance is absolute.
        log_start = (a - 1) * mp.log(z) - z

        def integrand(x):
            u = z + x * direction
            return mp.exp((a - 1) * mp.log(u) - u - log_start) * direction

        scale = max(1, float(abs(a)) ** 0.5)
        points = [mp.mpf(0)]
        step = 0.25
        while step < 40 * scale + 4 * float(abs(a)):
            points.append(mp.mpf(step))
            step *= 2
        points.append(mp.inf)
        value = mp.quad(integrand, points) * mp.exp(log_start - mp.loggamma(a))
    return +value


def q_lower_series(a, z) -> mp.mpc:
    """P(a, z) = gamma(a, z)/Gamma(a) from the power series of the lower function."""
    a = to_complex(a)
    z = to_complex(z)
    with mp.workdps(mp.mp.dps + 15):
        total = mp.mpc(0)
        term = 1 / a
        n = 0
        while True:
            total += term
            n += 1
            term *= z / (a + n)
            if abs(term) < mp.eps * abs(total):
                break
        value = mp.exp(a * mp.log(z) - z - mp.loggamma(a)) * total
    return +value
