"""Coefficient machinery for the correction term T_m(omega).

The functions S_k(omega), B_r(omega) and the correction T_m(omega) are
expressed through polynomials in cot(omega) and csc(omega) with exact
rational coefficients (:class:`TrigPoly`). The stored tables below are the
published listings; :func:`b_coeffs_generate` and :func:`d_coeffs` rebuild
them from the S-recurrence so the two can be compared exactly.

Index conventions
-----------------
``ALPHA[k]`` lists the coefficients of W_k(mu) = sum_r alpha_{r,k} mu^r,
lowest power first. ``B_TABLE[r, k]`` is b_{r,k} with

    S_{k+1}(omega) = csc(omega)/k! * sum_{r=0}^{k} b_{r,k} omega^{-r}.

The d coefficients follow from B_r(omega) = sum_j (-1)^j alpha_{j,r}
S_{2r+1-j}(omega) (2/omega)^j, which gives

    d_{r,k} = sum_{j=0}^{k} (-2)^j alpha_{j,r} b_{k-j, 2r-j} / (2r-j)!

(terms with k - j > 2r - j vanish).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import mpmath as mp

from .precision import CosecantPoleError, eps, omega_of_s, to_complex

F = Fraction

ALPHA: tuple[tuple[Fraction, ...], ...] = (
    (F(1),),
    (F(1), F(1), F(1, 12)),
    (F(3), F(5), F(25, 12), F(1, 12), F(1, 288)),
    (F(15), F(35), F(105, 4), F(77, 12), F(49, 288), F(1, 288), F(-139, 51840)),
)

# Stirling coefficients of 1/Gamma, fixed by W_r(-1) = (-1)^r gamma_r.
GAMMA: tuple[Fraction, ...] = (F(1), F(-1, 12), F(1, 288), F(139, 51840))

# eps = pi i / 4 is kept symbolic in TrigPoly and substituted at evaluation.
EPSILON_TEXT = "pi*i/4"

Monomial = tuple[int, int, int]  # powers of (cot, csc, eps)


@dataclass(frozen=True)
class TrigPoly:
    """Polynomial in C = cot(omega), S = csc(omega) and eps with rational coefficients."""

    terms: Mapping[Monomial, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: F(v) for k, v in self.terms.items() if v != 0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def const(cls, c) -> "TrigPoly":
        return cls({(0, 0, 0): F(c)})

    @classmethod
    def parse(cls, text: str) -> "TrigPoly":
        """Parse e.g. ``"cot^3 + 5 cot csc^2"`` or ``"-1/6 eps"``."""
        text = text.replace(" ", "").replace("*", "")
        if not text:
            return cls()
        out: dict[Monomial, Fraction] = {}
        for sign, body in re.findall(r"([+-]?)([^+-]+)", text):
            m = re.fullmatch(r"(\d+(?:/\d+)?)?((?:(?:cot|csc|eps)(?:\^\d+)?)*)", body)
            if m is None:
                raise ValueError(f"cannot parse term {body!r}")
            coef = F(m.group(1)) if m.group(1) else F(1)
            powers = [0, 0, 0]
            for name, p in re.findall(r"(cot|csc|eps)(?:\^(\d+))?", m.group(2)):
                powers[("cot", "csc", "eps").index(name)] += int(p or 1)
            if sign == "-":
                coef = -coef
            key = tuple(powers)
            out[key] = out.get(key, F(0)) + coef
        return cls(out)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, F(0)) + v
        return TrigPoly(out)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            out: dict[Monomial, Fraction] = {}
            for (a1, b1, e1), v1 in self.terms.items():
                for (a2, b2, e2), v2 in other.terms.items():
                    key = (a1 + a2, b1 + b2, e1 + e2)
                    out[key] = out.get(key, F(0)) + v1 * v2
            return TrigPoly(out)
        return TrigPoly({k: v * F(other) for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def derivative(self) -> "TrigPoly":
        """d/d omega, using cot' = -csc^2 and csc' = -csc cot."""
        out: dict[Monomial, Fraction] = {}
        for (i, j, e), v in self.terms.items():
            if i:
                key = (i - 1, j + 2, e)
                out[key] = out.get(key, F(0)) - i * v
            if j:
                key = (i + 1, j, e)
                out[key] = out.get(key, F(0)) - j * v
        return TrigPoly(out)

    def divide_csc(self) -> "TrigPoly":
        if any(j == 0 for (_, j, _) in self.terms):
            raise ValueError("polynomial is not divisible by csc")
        return TrigPoly({(i, j - 1, e): v for (i, j, e), v in self.terms.items()})

    def trig_degrees(self) -> set[int]:
        return {i + j for (i, j, _) in self.terms}

    def evaluate(self, cot, csc, epsilon=None):
        if epsilon is None:
            epsilon = mp.pi * mp.j / 4
        total = mp.mpc(0)
        for (i, j, e), v in self.terms.items():
            total += mp.mpf(v.numerator) / v.denominator * cot**i * csc**j * epsilon**e
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j, e), v in sorted(self.terms.items(), key=lambda kv: (-kv[0][2], -kv[0][0], kv[0][1])):
            factors = []
            for name, p in (("eps", e), ("cot", i), ("csc", j)):
                if p:
                    factors.append(name if p == 1 else f"{name}^{p}")
            mag = abs(v)
            if factors:
                body = " ".join(factors) if mag == 1 else f"{mag} " + " ".join(factors)
            else:
                body = str(mag)
            parts.append(("- " if v < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


_tp = TrigPoly.parse

_B02 = "cot^2 + csc^2"
_B03 = "cot^3 + 5 cot csc^2"
_B04 = "cot^4 + 18 cot^2 csc^2 + 5 csc^4"
_B05 = "cot^5 + 58 cot^3 csc^2 + 61 cot csc^4"
_B06 = "cot^6 + 179 cot^4 csc^2 + 479 cot^2 csc^4 + 61 csc^6"

# Published b_{r,k}, 0 <= r <= k <= 6, as (multiplier, polynomial).
_B_LISTING: dict[tuple[int, int], tuple[int, str]] = {
    (0, 0): (1, "1"),
    (0, 1): (1, "cot"), (1, 1): (1, "1"),
    (0, 2): (1, _B02), (1, 2): (3, "cot"), (2, 2): (3, "1"),
    (0, 3): (1, _B03), (1, 3): (6, _B02), (2, 3): (15, "cot"), (3, 3): (15, "1"),
    (0, 4): (1, _B04), (1, 4): (10, _B03), (2, 4): (45, _B02), (3, 4): (105, "cot"), (4, 4): (105, "1"),
    (0, 5): (1, _B05), (1, 5): (15, _B04), (2, 5): (105, _B03), (3, 5): (420, _B02),
    (4, 5): (945, "cot"), (5, 5): (945, "1"),
    (0, 6): (1, _B06), (1, 6): (21, _B05), (2, 6): (210, _B04), (3, 6): (1260, _B03),
    (4, 6): (4725, _B02), (5, 6): (10395, "cot"), (6, 6): (10395, "1"),
}

B_TABLE: dict[tuple[int, int], TrigPoly] = {
    rk: _tp(text) * mult for rk, (mult, text) in _B_LISTING.items()
}
B_KMAX = 6


@dataclass(frozen=True)
class CoefficientTable:
    alpha: tuple[tuple[Fraction, ...], ...]
    gamma: tuple[Fraction, ...]
    b: Mapping[tuple[int, int], TrigPoly]
    epsilon: str = EPSILON_TEXT


COEFFICIENTS = CoefficientTable(ALPHA, GAMMA, B_TABLE)


def w_poly(r: int, mu):
    """W_r(mu) by Horner's rule; exact for Fraction input."""
    if not 0 <= r < len(ALPHA):
        raise ValueError(f"W_r is tabulated for r = 0..{len(ALPHA) - 1}")
    exact = isinstance(mu, (int, Fraction))
    total = F(0) if exact else mp.mpc(0)
    for c in reversed(ALPHA[r]):
        total = total * mu + (c if exact else mp.mpf(c.numerator) / c.denominator)
    return total


# -- S functions ---------------------------------------------------------------------

OmegaSeries = dict  # power of 1/omega -> TrigPoly


@lru_cache(maxsize=None)
def _s_series(k: int) -> tuple[TrigPoly, ...]:
    """S_k(omega) as sum_r P_r(cot, csc) omega^{-r}, built by the recurrence."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return (_tp("csc"),)
    prev = _s_series(k - 1)
    out: OmegaSeries = {}
    for r, p in enumerate(prev):
        # S_k = S_{k-1}/omega - (d/d omega S_{k-1}) / (k-1)
        out[r + 1] = out.get(r + 1, TrigPoly()) + p + p * F(r, k - 1)
        out[r] = out.get(r, TrigPoly()) - p.derivative() * F(1, k - 1)
    return tuple(out.get(r, TrigPoly()) for r in range(max(out) + 1))


def b_coeffs_generate(k_max: int) -> dict[tuple[int, int], TrigPoly]:
    """Regenerate b_{r,k} for 0 <= r <= k <= k_max from the S recurrence."""
    if not 0 <= k_max <= 8:
        raise ValueError("k_max must be in 0..8")
    table = {}
    for k in range(k_max + 1):
        series = _s_series(k + 1)
        for r in range(k + 1):
            p = series[r] if r < len(series) else TrigPoly()
            table[r, k] = p.divide_csc() * math.factorial(k)
    return table


def _trig_values(omega):
    omega = to_complex(omega)
    sin = mp.sin(omega)
    if abs(sin) <= eps() * max(1, abs(omega)):
        raise CosecantPoleError(f"csc(omega) has a pole at omega = {omega}")
    return mp.cos(omega) / sin, 1 / sin


def s_func(k: int, omega) -> mp.mpc:
    """S_k(omega) from the stored b table (k = 1..7)."""
    if not 1 <= k <= B_KMAX + 1:
        raise ValueError(f"s_func supports k = 1..{B_KMAX + 1}")
    omega = to_complex(omega)
    cot, csc = _trig_values(omega)
    total = mp.mpc(0)
    for r in range(k):
        total += B_TABLE[r, k - 1].evaluate(cot, csc) / omega**r
    return csc * total / math.factorial(k - 1)


def s_recurrence(k: int, omega) -> mp.mpc:
    """S_k(omega) from the recurrence-built symbolic form, independent of B_TABLE."""
    omega = to_complex(omega)
    cot, csc = _trig_values(omega)
    return sum(p.evaluate(cot, csc) / omega**r for r, p in enumerate(_s_series(k)))


# -- B_r, d_{r,k}, D_k(m), T_m ---------------------------------------------------------


@lru_cache(maxsize=None)
def d_coeffs(r: int) -> tuple[TrigPoly, ...]:
    """d_{r,k} for k = 0..2r with B_r(omega) = csc(omega) sum_k d_{r,k} omega^{-k}."""
    if not 0 <= r < len(ALPHA):
        raise ValueError(f"d_coeffs supports r = 0..{len(ALPHA) - 1}")
    out = []
    for k in range(2 * r + 1):
        acc = TrigPoly()
        for j in range(k + 1):
            p = k - j
            if p > 2 * r - j:
                continue
            weight = F(-2) ** j * ALPHA[r][j] / math.factorial(2 * r - j)
            acc = acc + B_TABLE[p, 2 * r - j] * weight
        out.append(acc)
    return tuple(out)


def d_listing(k: int, m: int) -> TrigPoly:
    """D_k(m) = sum_{r=ceil(k/2)}^{m-1} eps^r d_{r,k}, with eps symbolic."""
    if not 1 <= m <= len(ALPHA):
        raise ValueError(f"D_k(m) is available for m = 1..{len(ALPHA)}")
    if not 0 <= k <= 2 * m - 2:
        raise ValueError(f"k must satisfy 0 <= k <= 2m-2 = {2 * m - 2}")
    acc = TrigPoly()
    for r in range((k + 1) // 2, m):
        acc = acc + d_coeffs(r)[k] * TrigPoly({(0, 0, r): F(1)})
    return acc


def big_d(k: int, m: int, omega) -> mp.mpc:
    cot, csc = _trig_values(omega)
    return d_listing(k, m).evaluate(cot, csc)


def b_r_via_s(r: int, omega) -> mp.mpc:
    """B_r(omega) = sum_j (-1)^j alpha_{j,r} S_{2r+1-j}(omega) (2/omega)^j."""
    omega = to_complex(omega)
    total = mp.mpc(0)
    for j, alpha in enumerate(ALPHA[r]):
        a = mp.mpf(alpha.numerator) / alpha.denominator
        total += (-1) ** j * a * s_func(2 * r + 1 - j, omega) * (2 / omega) ** j
    return total


def b_r_closed(r: int, omega) -> mp.mpc:
    omega = to_complex(omega)
    cot, csc = _trig_values(omega)
    return csc * sum(d.evaluate(cot, csc) / omega**k for k, d in enumerate(d_coeffs(r)))


def t_correction(m: int, omega, method: str = "D") -> mp.mpc:
    """Correction T_m(omega).

    ``method="D"`` uses csc(omega) sum_k D_k(m) omega^{-k}; ``method="S"`` sums
    (pi i/4)^r B_r(omega) with B_r built from the S functions.
    """
    if not 1 <= m <= len(ALPHA):
        raise ValueError(f"T_m is available for m = 1..{len(ALPHA)}")
    omega = to_complex(omega)
    if method == "D":
        cot, csc = _trig_values(omega)
        total = sum(d_listing(k, m).evaluate(cot, csc) / omega**k for k in range(2 * m - 1))
        return csc * total
    if method == "S":
        epsilon = mp.pi * mp.j / 4
        return sum(epsilon**r * b_r_via_s(r, omega) for r in range(m))
    raise ValueError(f"unknown method {method!r}")


def a_coeff(r: int, s) -> mp.mpc:
    """A_r(s) = 2^{-2r} omega^{2r+1} B_r(omega), omega = omega_of_s(s)."""
    omega = omega_of_s(s)
    return omega ** (2 * r + 1) * b_r_closed(r, omega) / 4**r

