"""Segmented prime sieve with a factor sieve over the shifted values p - 1.

Blocks of ``block_size`` consecutive integers are independent work units. A
block is sieved for primality with the base primes <= sqrt(limit); the same
base primes are then divided out of the shifted values p - 1 by striding over
their residue class p = 1 (mod q**j). Whatever cofactor is left after that
exceeds sqrt(limit) and is therefore prime.

Blocks are processed by a thread pool and merged in block order, so every
output is independent of ``block_size`` and ``worker_count``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt
from typing import Iterator

import numpy as np

from .errors import DomainError, EmptyRangeError, InvalidModulusError

MAX_LIMIT = 1 << 40
MIN_BLOCK = 1 << 10
DEFAULT_BLOCK = 1 << 22


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SPLAB_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SieveConfig:
    limit: int
    block_size: int = DEFAULT_BLOCK
    worker_count: int = field(default_factory=default_workers)

    def __post_init__(self):
        if self.limit < 2:
            raise EmptyRangeError(f"no primes up to {self.limit}")
        if self.limit > MAX_LIMIT:
            raise DomainError(f"limit {self.limit} exceeds the 2**40 ceiling")
        if self.block_size < MIN_BLOCK:
            raise DomainError(f"block_size must be at least {MIN_BLOCK}")
        if self.worker_count < 1:
            raise DomainError("worker_count must be positive")

    def with_limit(self, limit: int) -> "SieveConfig":
        return SieveConfig(limit, self.block_size, self.worker_count)


@dataclass(frozen=True)
class ShiftedFactorization:
    """A prime p together with the factorisation of p - 1."""

    p: int
    shifted_factors: tuple[tuple[int, int], ...]
    largest: int


@dataclass(frozen=True)
class ProgressionQuery:
    x: int
    modulus: int
    residue: int = 1

    def __post_init__(self):
        if self.modulus < 2:
            raise InvalidModulusError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise DomainError(f"residue {self.residue} not in [0, {self.modulus})")


@dataclass(frozen=True)
class ShiftedBlock:
    """Columnar factorisations of p - 1 for the primes of one block.

    The factors of ``primes[i] - 1`` are ``factor_q[ptr[i]:ptr[i+1]]`` with
    exponents ``factor_e[...]``, ascending in q.
    """

    primes: np.ndarray
    largest: np.ndarray
    ptr: np.ndarray
    factor_q: np.ndarray
    factor_e: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def records(self) -> Iterator[ShiftedFactorization]:
        ptr = self.ptr.tolist()
        fq = self.factor_q.tolist()
        fe = self.factor_e.tolist()
        for i, (p, big) in enumerate(zip(self.primes.tolist(), self.largest.tolist())):
            lo, hi = ptr[i], ptr[i + 1]
            yield ShiftedFactorization(p, tuple(zip(fq[lo:hi], fe[lo:hi])), big)

    def prefix(self, x: int) -> "ShiftedBlock":
        """Restriction to primes <= x."""
        n = int(np.searchsorted(self.primes, x, side="right"))
        if n == len(self.primes):
            return self
        end = int(self.ptr[n])
        return ShiftedBlock(
            self.primes[:n], self.largest[:n], self.ptr[: n + 1],
            self.factor_q[:end], self.factor_e[:end],
        )

    @classmethod
    def concat(cls, blocks: list["ShiftedBlock"]) -> "ShiftedBlock":
        if len(blocks) == 1:
            return blocks[0]
        ptrs, offset = [np.zeros(1, dtype=np.int64)], 0
        for b in blocks:
            ptrs.append(b.ptr[1:] + offset)
            offset += int(b.ptr[-1])
        return cls(
            np.concatenate([b.primes for b in blocks]),
            np.concatenate([b.largest for b in blocks]),
            np.concatenate(ptrs),
            np.concatenate([b.factor_q for b in blocks]),
            np.concatenate([b.factor_e for b in blocks]),
        )


@lru_cache(maxsize=8)
def small_primes(n: int) -> np.ndarray:
    """All primes <= n by a plain (unsegmented) sieve; for the base table."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


@lru_cache(maxsize=4)
def largest_factor_table(n: int) -> np.ndarray:
    """Array t of length n + 1 with t[m] = P(m) and t[0] = t[1] = 1."""
    table = np.ones(n + 1, dtype=np.int64)
    for p in small_primes(n).tolist():
        table[p::p] = p
    table.setflags(write=False)
    return table


def _block_bounds(config: SieveConfig) -> list[tuple[int, int]]:
    stop = config.limit + 1
    return [(lo, min(lo + config.block_size, stop)) for lo in range(2, stop, config.block_size)]


def _prime_mask(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """is_prime flags for the integers lo..hi-1 (lo >= 2)."""
    flags = np.ones(hi - lo, dtype=bool)
    for q in base.tolist():
        qq = q * q
        if qq >= hi:
            break
        start = max(qq, -(-lo // q) * q)
        flags[start - lo :: q] = False
    return flags


def _primes_block(bounds: tuple[int, int], base: np.ndarray) -> np.ndarray:
    lo, hi = bounds
    return np.flatnonzero(_prime_mask(lo, hi, base)).astype(np.int64) + lo


def _shifted_block(bounds: tuple[int, int], base: np.ndarray) -> ShiftedBlock:
    lo, hi = bounds
    mask = _prime_mask(lo, hi, base)
    # rem[i] is the shifted value (lo + i) - 1 with small factors removed
    rem = np.arange(lo - 1, hi - 1, dtype=np.int64)
    top = hi - 2
    hits = np.zeros(hi - lo, dtype=np.int8)
    pos_parts, q_parts, e_parts = [], [], []
    for q in base.tolist():
        if q > top:
            break
        first = None
        qj = q
        while qj <= top:
            s = (-(lo - 1)) % qj
            rem[s::qj] //= q
            hits[s::qj] += 1
            if first is None:
                first = s
            qj *= q
        idx = np.arange(first, hi - lo, q, dtype=np.int64)
        idx = idx[mask[idx]]
        if idx.size:
            pos_parts.append(idx)
            q_parts.append(np.full(idx.size, q, dtype=np.int64))
            e_parts.append(hits[idx].copy())
        hits[first::q] = 0
    cof = np.flatnonzero(mask & (rem > 1))
    pos_parts.append(cof.astype(np.int64))
    q_parts.append(rem[cof])
    e_parts.append(np.ones(cof.size, dtype=np.int8))

    pos = np.concatenate(pos_parts)
    fq = np.concatenate(q_parts)
    fe = np.concatenate(e_parts)
    order = np.lexsort((fq, pos))
    pos, fq, fe = pos[order], fq[order], fe[order]

    prime_pos = np.flatnonzero(mask)
    counts = np.bincount(np.searchsorted(prime_pos, pos), minlength=prime_pos.size)
    ptr = np.zeros(prime_pos.size + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    largest = np.ones(prime_pos.size, dtype=np.int64)
    has = counts > 0
    largest[has] = fq[ptr[1:][has] - 1]
    return ShiftedBlock(prime_pos.astype(np.int64) + lo, largest, ptr, fq, fe)


def _map_blocks(func, config: SieveConfig):
    base = small_primes(isqrt(config.limit))
    bounds = _block_bounds(config)
    if config.worker_count == 1 or len(bounds) == 1:
        for b in bounds:
            yield func(b, base)
        return
    with ThreadPoolExecutor(max_workers=config.worker_count) as pool:
        # map() yields in submission order, which keeps the stream block-ordered
        yield from pool.map(lambda b: func(b, base), bounds)


def iter_prime_blocks(config: SieveConfig) -> Iterator[np.ndarray]:
    yield from _map_blocks(_primes_block, config)


def enumerate_primes(config: SieveConfig) -> Iterator[int]:
    """The primes in [2, config.limit], ascending."""
    for block in iter_prime_blocks(config):
        yield from block.tolist()


def iter_shifted_blocks(config: SieveConfig) -> Iterator[ShiftedBlock]:
    yield from _map_blocks(_shifted_block, config)


def shifted_factor_scan(config: SieveConfig) -> Iterator[ShiftedFactorization]:
    """One ShiftedFactorization per prime p <= config.limit, ascending in p."""
    for block in iter_shifted_blocks(config):
        yield from block.records()


@lru_cache(maxsize=4)
def _prime_array(config: SieveConfig) -> np.ndarray:
    arr = np.concatenate(list(iter_prime_blocks(config)))
    arr.setflags(write=False)
    return arr


def prime_array(limit: int, config: SieveConfig | None = None) -> np.ndarray:
    """Read-only int64 array of the primes <= limit (empty when limit < 2)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    if config is not None and config.limit >= limit:
        arr = _prime_array(config)
        return arr[: int(np.searchsorted(arr, limit, side="right"))]
    config = SieveConfig(limit) if config is None else config.with_limit(limit)
    return _prime_array(config)


@lru_cache(maxsize=4)
def _shifted_table(config: SieveConfig) -> ShiftedBlock:
    return ShiftedBlock.concat(list(iter_shifted_blocks(config)))


def shifted_table(limit: int, config: SieveConfig | None = None) -> ShiftedBlock:
    """All factorisations of p - 1 for p <= limit as one columnar block.

    A ``config`` whose limit already covers ``limit`` is reused and cut down,
    so a grid of x values costs a single sieve.
    """
    if config is not None and config.limit >= limit:
        return _shifted_table(config).prefix(limit)
    config = SieveConfig(limit) if config is None else config.with_limit(limit)
    return _shifted_table(config)


def count_primes_in_progression(q: ProgressionQuery, config: SieveConfig | None = None) -> int:
    """Number of primes p <= q.x with p = q.residue (mod q.modulus)."""
    if q.x < 2:
        return 0
    primes = prime_array(q.x, config)
    return int(np.count_nonzero(primes % q.modulus == q.residue))


def primes_in_progression(
    q: ProgressionQuery, limit_count: int | None = None, config: SieveConfig | None = None
) -> list[int]:
    """Ascending primes p <= q.x with p = q.residue (mod q.modulus)."""
    if limit_count is not None and limit_count < 1:
        raise DomainError("limit_count must be positive")
    if q.x < 2:
        return []
    primes = prime_array(q.x, config)
    hits = primes[primes % q.modulus == q.residue]
    if limit_count is not None:
        hits = hits[:limit_count]
    return hits.tolist()
