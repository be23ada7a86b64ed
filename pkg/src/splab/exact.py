"""Exact rational exponents and integer power comparisons.

Every threshold of the form ``P >= p**(u/v)`` or ``P**v > n**u`` is decided in
integer arithmetic. The vectorised comparison uses a floating-point log test
only where its answer is far from the boundary, and falls back to Python
integers for the rest, so the decision never depends on rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import gmpy2
import numpy as np

from .errors import DomainError

# Relative margin for trusting the float log comparison. Double precision logs
# of values below 2**63 carry ~1e-16 relative error, so this is very loose.
_LOG_MARGIN = 1e-9


@dataclass(frozen=True, order=True)
class RationalExponent:
    """An exponent num/den in [0, 1], stored in lowest terms."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise DomainError(f"denominator must be positive, got {self.den}")
        if self.num < 0 or self.num > self.den:
            raise DomainError(f"exponent {self.num}/{self.den} outside [0, 1]")
        if gcd(self.num, self.den) != 1:
            raise DomainError(f"{self.num}/{self.den} is not in lowest terms")

    @classmethod
    def of(cls, value) -> "RationalExponent":
        """Coerce a RationalExponent, Fraction, int or "u/v" string."""
        if isinstance(value, cls):
            return value
        if isinstance(value, float):
            raise DomainError("exponents must be exact fractions, not floats")
        if isinstance(value, str):
            return cls.parse(value)
        f = Fraction(value)
        return cls(f.numerator, f.denominator)

    @classmethod
    def parse(cls, text: str) -> "RationalExponent":
        """Parse "u/v" or an integer. Decimal notation is rejected."""
        text = text.strip()
        if "." in text or "e" in text.lower():
            raise DomainError(f"exponent {text!r} must be written as a fraction u/v")
        try:
            f = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse exponent {text!r}") from exc
        return cls(f.numerator, f.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __float__(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


def floor_root(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0 or k < 1:
        raise DomainError(f"floor_root({n}, {k}) undefined")
    return int(gmpy2.iroot(gmpy2.mpz(n), k)[0])


def _as_fraction(e) -> Fraction:
    return e if isinstance(e, Fraction) else RationalExponent.of(e).fraction


def floor_power(x: int, e) -> int:
    """floor(x**e) for a rational exponent e, exactly."""
    e = _as_fraction(e)
    return floor_root(x**e.numerator, e.denominator)


def ceil_power(x: int, e) -> int:
    """Smallest integer t with t >= x**e, exactly."""
    e = _as_fraction(e)
    target = x**e.numerator
    r = floor_root(target, e.denominator)
    return r if r**e.denominator == target else r + 1


def compare_powers(base, base_exp: int, other, other_exp: int) -> np.ndarray:
    """Elementwise sign of ``base**base_exp - other**other_exp``.

    ``base`` and ``other`` are positive integers (scalars or int64 arrays,
    broadcast together). Returns an int8 array of -1, 0, 1.
    """
    b = np.asarray(base, dtype=np.int64)
    o = np.asarray(other, dtype=np.int64)
    b, o = np.broadcast_arrays(b, o)
    shape = b.shape
    b, o = b.ravel(), o.ravel()
    if b.size and (b.min() < 1 or o.min() < 1):
        raise DomainError("compare_powers needs positive integers")
    lhs = base_exp * np.log(b.astype(np.float64))
    rhs = other_exp * np.log(o.astype(np.float64))
    diff = lhs - rhs
    tol = _LOG_MARGIN * (1.0 + np.abs(lhs) + np.abs(rhs))
    out = np.sign(diff).astype(np.int8)
    for i in np.flatnonzero(np.abs(diff) <= tol).tolist():
        lv = int(b[i]) ** base_exp
        rv = int(o[i]) ** other_exp
        out[i] = (lv > rv) - (lv < rv)
    return out.reshape(shape)


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation of |n| by trial division; [] for |n| <= 1."""
    n = abs(int(n))
    out = []
    if n <= 1:
        return out
    for q in (2, 3):
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        if e:
            out.append((q, e))
    q = 5
    while q * q <= n:
        for d in (q, q + 2):
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            if e:
                out.append((d, e))
        q += 6
    if n > 1:
        out.append((n, 1))
    return out


def largest_prime_factor(n: int) -> int:
    """P(n), with P(0) = P(1) = P(-1) = 1."""
    f = factorize(n)
    return f[-1][0] if f else 1


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    if n < 1 << 20:
        return all(n % d for d in range(2, isqrt(n) + 1))
    return bool(gmpy2.is_prime(n))
