"""Extended-precision carriers and elementary functions.

All arithmetic runs on mpmath ``mpf``/``mpc`` values. Precision is carried by
the mpmath context; :func:`working_precision` is the one place callers should
set it. Every function here computes at whatever precision is active.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator

import mpmath as mp

DEFAULT_DIGITS = 40
MIN_DIGITS = 20
MAX_DIGITS = 100
DIGITS_ENV_VAR = "ZERFC_DIGITS"

# Extra digits carried internally on top of the requested working precision.
GUARD_DIGITS = 10


class DomainError(ValueError):
    """Argument outside the domain of the requested function."""


class CosecantPoleError(DomainError):
    """sin(z) vanishes to working precision."""


class ConvergenceError(ArithmeticError):
    """An iterative evaluation did not converge within its iteration cap."""


def default_digits() -> int:
    raw = os.environ.get(DIGITS_ENV_VAR)
    if raw is None:
        return DEFAULT_DIGITS
    return check_digits(int(raw))


def check_digits(digits: int) -> int:
    if not MIN_DIGITS <= digits <= MAX_DIGITS:
        raise ValueError(f"precision must be in [{MIN_DIGITS}, {MAX_DIGITS}] digits, got {digits}")
    return digits


@contextmanager
def working_precision(digits: int, guard: int = GUARD_DIGITS) -> Iterator[int]:
    """Run the enclosed block at ``digits + guard`` decimal digits."""
    check_digits(digits)
    with mp.workdps(digits + guard):
        yield digits


def eps() -> mp.mpf:
    """Unit roundoff of the active context."""
    return mp.mpf(2) ** (-mp.mp.prec)


def to_real(x) -> mp.mpf:
    """Convert ``x`` to ``mpf``; strings are parsed exactly at the active precision."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def to_complex(z) -> mp.mpc:
    if isinstance(z, Fraction):
        return mp.mpc(to_real(z))
    return mp.mpc(z)


def _csc(z):
    s = mp.sin(z)
    if abs(s) <= eps() * max(1, abs(z)):
        raise CosecantPoleError(f"csc has a pole at {z}")
    return 1 / s


def _cot(z):
    s = mp.sin(z)
    if abs(s) <= eps() * max(1, abs(z)):
        raise CosecantPoleError(f"cot has a pole at {z}")
    return mp.cos(z) / s


def _log(z):
    if z == 0:
        raise DomainError("log(0)")
    return mp.log(z)


def _sqrt(z):
    if z == 0:
        raise DomainError("sqrt(0) is excluded from the principal-branch contract")
    return mp.sqrt(z)


ELEMENTARY = {
    "exp": mp.exp,
    "log": _log,
    "sqrt": _sqrt,
    "sin": mp.sin,
    "cos": mp.cos,
    "csc": _csc,
    "cot": _cot,
}


def complex_elementary(z, f: str) -> mp.mpc:
    """Evaluate the elementary function tagged ``f`` at ``z`` on the principal branch.

    ``log`` returns imaginary part in (-pi, pi]; ``sqrt`` maps into the closed
    right half-plane.
    """
    try:
        fn = ELEMENTARY[f]
    except KeyError:
        raise ValueError(f"unknown function tag {f!r}; expected one of {sorted(ELEMENTARY)}") from None
    z = to_complex(z)
    if not (mp.isfinite(z.real) and mp.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {z}")
    return mp.mpc(fn(z))


def cpow(z, w) -> mp.mpc:
    """Principal power z**w = exp(w log z)."""
    return mp.exp(w * _log(to_complex(z)))


def omega_of_s(s) -> mp.mpc:
    """Root of omega^2 = pi s / (2i) with positive real part.

    This is the single branch convention the rest of the package assumes.
    """
    s = to_complex(s)
    w2 = mp.pi * s / mp.mpc(0, 2)
    if w2 == 0:
        raise DomainError("s = 0")
    w = mp.sqrt(w2)
    if w.real < 0 or (w.real == 0 and w.imag < 0):
        w = -w
    return w


# Bernoulli numbers B_0, B_1, ... (B_1 = -1/2), extended on demand.
_BERNOULLI: list[Fraction] = [Fraction(1)]


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n from the standard binomial recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    while len(_BERNOULLI) <= n:
        m = len(_BERNOULLI)
        if m > 1 and m % 2 == 1:
            _BERNOULLI.append(Fraction(0))
            continue
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * _BERNOULLI[k]
            binom = binom * (m + 1 - k) // (k + 1)
        _BERNOULLI.append(-acc / (m + 1))
    return _BERNOULLI[n]
