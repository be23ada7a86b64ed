"""Counts and weighted sums over shifted primes.

All sums are kept as exact integer histograms over the prime q carrying the
log weight, and only turned into a float at the end with ``math.fsum`` over
ascending q. That makes every value independent of how the sieve was blocked
or parallelised.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, EmptyRangeError
from .exact import RationalExponent, ceil_power, compare_powers, factorize, floor_power
from .sieve import SieveConfig, ShiftedBlock, prime_array, shifted_table

ALPHA_MAX = Fraction(1, 4)


class SumKind(enum.Enum):
    M_SUM = "M_SUM"
    L_SUM = "L_SUM"
    LK_SUM = "LK_SUM"


@dataclass(frozen=True)
class DensityPoint:
    x: int
    count: int
    reference: float
    ratio: float
    pi_x: int

    @classmethod
    def build(cls, x: int, count: int, constant: Fraction, pi_x: int) -> "DensityPoint":
        logx = math.log(x)
        return cls(x, count, float(constant) * x / logx, count * logx / x, pi_x)

    @property
    def ratio_to_pi(self) -> float:
        return self.count / self.pi_x


@dataclass(frozen=True)
class SumRecord:
    kind: SumKind
    params: dict = field(hash=False)
    value: float
    terms: int


@dataclass(frozen=True)
class XPower:
    """The real number base**exponent, kept exact for use as a summation cut."""

    base: int
    exponent: RationalExponent

    def floor(self) -> int:
        return floor_power(self.base, self.exponent)

    def __float__(self) -> float:
        return float(self.base) ** float(self.exponent)


@dataclass(frozen=True)
class Decomposition:
    """L(x;1,x) split at x^c/(log x)^B and x^c."""

    x: int
    c: RationalExponent
    B: float
    low: SumRecord
    mid: SumRecord
    high: SumRecord
    total: SumRecord

    @property
    def parts_sum(self) -> float:
        return math.fsum((self.low.value, self.mid.value, self.high.value))


def von_mangoldt(m: int) -> float:
    """log q when m is a power of the prime q, else 0."""
    if m < 1:
        raise DomainError(f"von_mangoldt undefined at {m}")
    f = factorize(m)
    return math.log(f[0][0]) if len(f) == 1 else 0.0


def _table(x: int, config: SieveConfig | None) -> ShiftedBlock:
    if x < 2:
        raise EmptyRangeError(f"no primes up to {x}")
    return shifted_table(x, config)


def _log_weighted(qs: np.ndarray) -> float:
    """Sum of log(q) over qs, computed from exact per-q multiplicities."""
    if qs.size == 0:
        return 0.0
    uq, counts = np.unique(qs, return_counts=True)
    return math.fsum((counts * np.log(uq.astype(np.float64))).tolist())


def _check_alpha(alpha: RationalExponent) -> None:
    if alpha.fraction > ALPHA_MAX:
        raise DomainError(f"alpha={alpha} outside [0, 1/4]")


def _check_c(c: RationalExponent, lo: Fraction, closed_lo: bool = True) -> None:
    f = c.fraction
    if f > Fraction(1, 2) or f < lo or (not closed_lo and f == lo):
        bracket = "[" if closed_lo else "("
        raise DomainError(f"c={c} outside {bracket}{lo}, 1/2]")


def count_N_alpha(x: int, alpha, config: SieveConfig | None = None) -> DensityPoint:
    """Primes p <= x with P(p-1) >= p^(1/2 - alpha), compared exactly."""
    alpha = RationalExponent.of(alpha)
    _check_alpha(alpha)
    t = _table(x, config).prefix(x)
    e = Fraction(1, 2) - alpha.fraction
    ok = compare_powers(t.largest, e.denominator, t.primes, e.numerator) >= 0
    return DensityPoint.build(x, int(np.count_nonzero(ok)), Fraction(1, 2) + alpha.fraction, len(t))


def count_N_prime_c(x: int, c, config: SieveConfig | None = None) -> DensityPoint:
    """Primes p <= x with P(p-1) >= x^c (threshold in x, not in p)."""
    c = RationalExponent.of(c)
    _check_c(c, Fraction(1, 4))
    t = _table(x, config).prefix(x)
    threshold = ceil_power(x, c)
    count = int(np.count_nonzero(t.largest >= threshold))
    return DensityPoint.build(x, count, 1 - c.fraction, len(t))


def m_sum(x: int, c, config: SieveConfig | None = None) -> SumRecord:
    """Sum over p <= x of log l for the primes l | p-1 with l >= x^c."""
    c = RationalExponent.of(c)
    _check_c(c, Fraction(0), closed_lo=False)
    t = _table(x, config).prefix(x)
    threshold = ceil_power(x, c)
    big = t.factor_q[t.factor_q >= threshold]
    return SumRecord(SumKind.M_SUM, {"x": x, "c": str(c)}, _log_weighted(big), int(big.size))


def _floor_cut(v) -> int:
    if isinstance(v, XPower):
        return v.floor()
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return math.floor(v)
    return math.floor(float(v))


def _prime_power_divisors(t: ShiftedBlock, lo: int, hi: int) -> np.ndarray:
    """For each p in t and each prime power m | p-1 with lo < m <= hi, the
    prime q with m = q^j. Returned as one flat array of q's."""
    out = []
    fq, fe = t.factor_q, t.factor_e
    j = 1
    while fq.size:
        m = fq**j
        hit = (m > lo) & (m <= hi)
        out.append(fq[hit])
        keep = fe > j
        fq, fe = fq[keep], fe[keep]
        j += 1
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def _l_record(t: ShiftedBlock, x: int, lo: int, hi: int, params: dict) -> SumRecord:
    qs = _prime_power_divisors(t, lo, hi)
    return SumRecord(SumKind.L_SUM, params, _log_weighted(qs), int(qs.size))


def l_sum(x: int, u, v, config: SieveConfig | None = None) -> SumRecord:
    """L(x;u,v): sum over u < m <= v of Lambda(m) * pi(x;m,1).

    Computed in swapped order: for every prime p <= x, add log q for each
    prime power q^j dividing p-1 that falls in (u, v]. ``u`` and ``v`` may be
    ints, floats, Fractions or exact ``XPower`` cut points.
    """
    if float(u) >= float(v):
        raise EmptyRangeError(f"empty range ({float(u)}, {float(v)}]")
    if float(u) < 1 or float(v) > x:
        raise DomainError(f"need 1 <= u < v <= x, got u={float(u)}, v={float(v)}, x={x}")
    t = _table(x, config).prefix(x)
    return _l_record(t, x, _floor_cut(u), _floor_cut(v), {"x": x, "u": float(u), "v": float(v)})


def decomposition_report(
    x: int, c, B: float = 1.0, config: SieveConfig | None = None
) -> Decomposition:
    """Split L(x;1,x) into (1, x^c/(log x)^B], (x^c/(log x)^B, x^c], (x^c, x]."""
    c = RationalExponent.of(c)
    _check_c(c, Fraction(0), closed_lo=False)
    if x < 3:
        raise DomainError("decomposition needs x >= 3")
    if B < 0:
        raise DomainError("B must be nonnegative")
    top = XPower(x, c)
    if B == 0:
        cut_lo, cut_hi = top.floor(), top.floor()
        mid_lo = float(top)
    else:
        mid_lo = float(top) / math.log(x) ** B
        cut_lo, cut_hi = math.floor(mid_lo), top.floor()
    if not 1 < mid_lo <= float(top) < x:
        raise EmptyRangeError(
            f"degenerate cuts 1 < {mid_lo:.6g} <= {float(top):.6g} < {x} violated"
        )
    t = _table(x, config).prefix(x)
    base = {"x": x, "c": str(c), "B": B}
    return Decomposition(
        x, c, B,
        _l_record(t, x, 1, cut_lo, {**base, "part": "low"}),
        _l_record(t, x, cut_lo, cut_hi, {**base, "part": "mid"}),
        _l_record(t, x, cut_hi, x, {**base, "part": "high"}),
        _l_record(t, x, 1, x, {**base, "part": "total"}),
    )


def kappa_estimate(points: list[DensityPoint]) -> float:
    """Finite-sample proxy for the lower relative density: min of count/pi(x).

    No convergence claim is attached to the value.
    """
    if not points:
        raise DomainError("kappa_estimate needs at least one point")
    return min(pt.count / pt.pi_x for pt in points)


def pi(x: int, config: SieveConfig | None = None) -> int:
    return int(prime_array(x, config).size)
