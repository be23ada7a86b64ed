"""Products n = p_1...p_k whose shifted factors share a large prime.

n belongs to A_{k,a} when P(gcd(p_1-1, ..., p_k-1)) > n^a. Three ways of
getting at the set live here: a brute-force pass over all k-tuples, an
enumeration driven by the common prime r = P(g) through the progressions
1 (mod r), and the explicit lower-bound family of k primes = 1 (mod r).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import CostGuardError, DomainError, InvalidModulusError
from .exact import RationalExponent, compare_powers, floor_root, is_prime, largest_prime_factor
from .shifted import SumKind, SumRecord
from .sieve import SieveConfig, largest_factor_table, prime_array

COST_GUARD = {2: 10**7}
DEFAULT_GUARD = 10**6


class EnumMode(enum.Enum):
    MULTIPLICITY = "multiplicity"  # p_1 <= ... <= p_k
    DISTINCT = "distinct"  # p_1 < ... < p_k

    @property
    def distinct(self) -> bool:
        return self is EnumMode.DISTINCT


@dataclass(frozen=True)
class TupleRecord:
    primes: tuple[int, ...]
    n: int
    g: int
    largest_of_g: int
    member: bool


@dataclass(frozen=True)
class EnumResult:
    count: int
    records: tuple[TupleRecord, ...] | None = None


@dataclass(frozen=True)
class ConstructionSpec:
    """Parameters of the lower-bound family. ``r=None`` scans the window
    x^a <= r <= 2x^a instead of a single common prime."""

    k: int
    a: RationalExponent
    x: int
    r: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "a", RationalExponent.of(self.a))
        if self.k < 2:
            raise DomainError("construction needs k >= 2")
        if self.r is not None and (self.r < 3 or not is_prime(self.r)):
            raise DomainError(f"r={self.r} must be an odd prime")


def is_member(primes, a) -> TupleRecord:
    """Exact membership test P(g)^den > n^num with g = gcd(p_i - 1)."""
    a = RationalExponent.of(a)
    primes = tuple(sorted(int(p) for p in primes))
    if not primes:
        raise DomainError("empty tuple")
    for p in primes:
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
    n = math.prod(primes)
    g = math.gcd(*(p - 1 for p in primes))
    big = largest_prime_factor(g)
    return TupleRecord(primes, n, g, big, big**a.den > n**a.num)


def check_exponent(k: int, a, unsafe: bool = False) -> RationalExponent:
    """Restrict a to [1/(2k), 17/(32k)) unless ``unsafe``."""
    a = RationalExponent.of(a)
    if k < 2:
        raise DomainError(f"k={k}: enumeration needs k >= 2")
    if a.num < 1:
        raise DomainError("a must be positive")
    if not unsafe and not Fraction(1, 2 * k) <= a.fraction < Fraction(17, 32 * k):
        raise DomainError(
            f"a={a} outside [1/{2 * k}, 17/{32 * k}); pass unsafe_exponent to explore"
        )
    return a


def cost_guard(x: int, k: int, allow_long_run: bool = False) -> None:
    cap = COST_GUARD.get(k, DEFAULT_GUARD)
    if x > cap and not allow_long_run:
        raise CostGuardError(f"x={x} exceeds the k={k} guard of {cap}; override to proceed")


def _tuple_blocks(
    pool: np.ndarray, k: int, nmax: int, distinct: bool
) -> Iterator[tuple[tuple[int, ...], np.ndarray, np.ndarray, np.ndarray]]:
    """All ascending k-tuples from ``pool`` with product <= nmax.

    Yields (prefix, last, n, g): the first k-1 primes, then arrays over the
    admissible last prime of the product and of gcd(p_i - 1).
    """
    pool_list = pool.tolist()

    def rec(prefix, prod, g, start, slots):
        if slots == 1:
            lo = start
            hi = int(np.searchsorted(pool, nmax // prod, side="right"))
            if hi <= lo:
                return
            last = pool[lo:hi]
            yield prefix, last, last * prod, np.gcd(last - 1, g)
            return
        for i in range(start, len(pool_list)):
            p = pool_list[i]
            if prod * p**slots > nmax:
                break
            yield from rec(prefix + (p,), prod * p, math.gcd(g, p - 1), i + distinct, slots - 1)

    yield from rec((), 1, 0, 0, k)


def _records(prefix, last, n, g, big, keep) -> list[TupleRecord]:
    return [
        TupleRecord(prefix + (p,), nn, gg, bb, True)
        for p, nn, gg, bb in zip(last[keep].tolist(), n[keep].tolist(), g[keep].tolist(), big[keep].tolist())
    ]


def brute_enumerate(
    x: int,
    k: int,
    a,
    mode: EnumMode = EnumMode.MULTIPLICITY,
    keep_records: bool = False,
    *,
    unsafe_exponent: bool = False,
    allow_long_run: bool = False,
    config: SieveConfig | None = None,
) -> EnumResult:
    """Count members of A_{k,a}(x) by testing every k-tuple with n <= x.

    ``records`` holds the member tuples only, in lexicographic order.
    """
    a = check_exponent(k, a, unsafe_exponent)
    cost_guard(x, k, allow_long_run)
    if x < 2**k:
        return EnumResult(0, () if keep_records else None)
    pool = prime_array(x // 2 ** (k - 1), config)
    table = largest_factor_table(floor_root(x, k))
    count, records = 0, []
    for prefix, last, n, g in _tuple_blocks(pool, k, x, mode.distinct):
        big = table[g]
        keep = compare_powers(big, a.den, n, a.num) > 0
        count += int(np.count_nonzero(keep))
        if keep_records:
            records.extend(_records(prefix, last, n, g, big, keep))
    return EnumResult(count, tuple(records) if keep_records else None)


def progression_enumerate(
    x: int,
    k: int,
    a,
    mode: EnumMode = EnumMode.MULTIPLICITY,
    keep_records: bool = False,
    *,
    unsafe_exponent: bool = False,
    allow_long_run: bool = False,
    config: SieveConfig | None = None,
) -> EnumResult:
    """Count A_{k,a}(x) by the common prime r of the shifted factors.

    Each tuple is counted once, under r = P(g). For a given r only tuples of
    primes = 1 (mod r) with n^num < r^den can qualify, so the product cutoff
    is min(x, floor((r^den - 1)^(1/num))) and r never exceeds x^(1/k).
    """
    a = check_exponent(k, a, unsafe_exponent)
    cost_guard(x, k, allow_long_run)
    rmax = floor_root(x, k)
    if x < 2**k or rmax < 2:
        return EnumResult(0, () if keep_records else None)
    primes = prime_array(x // 2 ** (k - 1), config)
    table = largest_factor_table(rmax)
    count, records = 0, []
    for r in primes[primes <= rmax].tolist():
        nmax = min(x, floor_root(r**a.den - 1, a.num))
        stop = int(np.searchsorted(primes, nmax // (r + 1) ** (k - 1), side="right"))
        pool = primes[:stop]
        pool = pool[pool % r == 1]
        if pool.size == 0 or (mode.distinct and pool.size < k):
            continue
        for prefix, last, n, g in _tuple_blocks(pool, k, nmax, mode.distinct):
            big = table[g]
            keep = big == r
            count += int(np.count_nonzero(keep))
            if keep_records:
                records.extend(_records(prefix, last, n, g, big, keep))
    if keep_records:
        records.sort(key=lambda rec: rec.primes)
        return EnumResult(count, tuple(records))
    return EnumResult(count)


def construction_window(x: int, a) -> tuple[int, int]:
    """Integer bounds of the candidate window x^a <= r <= 2 x^a."""
    a = RationalExponent.of(a)
    lo = floor_root(x**a.num, a.den)
    if lo**a.den < x**a.num:
        lo += 1
    return lo, floor_root((2**a.den) * x**a.num, a.den)


def construct_lower_family(
    spec: ConstructionSpec, max_tuples: int, *, cap_at_root: bool = False
) -> list[TupleRecord]:
    """Tuples of k distinct primes = 1 (mod r) with product <= x, each
    re-checked with ``is_member``.

    The pool is cut by the product bound; ``cap_at_root`` additionally keeps
    every prime <= x^(1/k) as in the classical construction.
    """
    if max_tuples < 1:
        raise DomainError("max_tuples must be positive")
    x, k = spec.x, spec.k
    if spec.r is not None:
        candidates = [spec.r]
    else:
        lo, hi = construction_window(x, spec.a)
        candidates = [r for r in prime_array(hi).tolist() if r >= max(lo, 3)]
    out: list[TupleRecord] = []
    for r in candidates:
        bound = floor_root(x, k) if cap_at_root else x // (r + 1) ** (k - 1)
        primes = prime_array(bound)
        pool = primes[primes % r == 1]
        if pool.size < k:
            continue
        for prefix, last, _, _ in _tuple_blocks(pool, k, x, distinct=True):
            for p in last.tolist():
                rec = is_member(prefix + (p,), spec.a)
                if rec.member:
                    out.append(rec)
                    if len(out) == max_tuples:
                        return out
    return out


def l_k_sum(
    x: int, k: int, *, allow_long_run: bool = False, config: SieveConfig | None = None
) -> SumRecord:
    """Sum over distinct k-tuples with p_1...p_k <= x of log gcd(p_i - 1)."""
    if k < 2:
        raise DomainError("l_k_sum needs k >= 2")
    cost_guard(x, k, allow_long_run)
    params = {"x": x, "k": k}
    if x < 2:
        return SumRecord(SumKind.LK_SUM, params, 0.0, 0)
    pool = prime_array(x // 2 ** (k - 1), config)
    gs = [g[g > 1] for _, _, _, g in _tuple_blocks(pool, k, x, distinct=True)]
    gs = np.concatenate(gs) if gs else np.zeros(0, dtype=np.int64)
    if gs.size == 0:
        return SumRecord(SumKind.LK_SUM, params, 0.0, 0)
    ug, counts = np.unique(gs, return_counts=True)
    value = math.fsum((counts * np.log(ug.astype(np.float64))).tolist())
    return SumRecord(SumKind.LK_SUM, params, value, int(gs.size))


def pi_k_progression(
    x: int, k: int, m: int, *, allow_long_run: bool = False, config: SieveConfig | None = None
) -> int:
    """Squarefree n <= x with exactly k prime factors, all = 1 (mod m)."""
    if m < 2:
        raise InvalidModulusError(f"modulus must be >= 2, got {m}")
    if k < 2:
        raise DomainError("pi_k_progression needs k >= 2")
    cost_guard(x, k, allow_long_run)
    primes = prime_array(x // (m + 1) ** (k - 1), config)
    pool = primes[primes % m == 1]
    return sum(len(last) for _, last, _, _ in _tuple_blocks(pool, k, x, distinct=True))
