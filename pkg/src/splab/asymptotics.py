"""Bound formulas, log-log exponent fits and the Brun-Titchmarsh window scan.

Envelope values are shape references with every implied constant set to 1;
they are never pass/fail lines.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, EmptyRangeError
from .exact import RationalExponent, floor_root
from .sieve import SieveConfig, prime_array, shifted_table

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeriesPoint:
    x: int
    count: int


@dataclass(frozen=True)
class BoundEnvelope:
    x: int
    k: int
    a: RationalExponent
    lower: float
    upper: float

    @property
    def exponent(self) -> Fraction:
        return 1 - self.a.fraction * (self.k - 1)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float
    points_used: int


@dataclass(frozen=True)
class BTWindow:
    """Window c1*y/(p log y) < pi(y;p,u) < c2*y/(p log y) over primes p <= y^nu."""

    y: int
    nu: Fraction
    c1: float
    c2: float
    u: int = 1

    def __post_init__(self):
        nu = self.nu if isinstance(self.nu, Fraction) else Fraction(self.nu)
        object.__setattr__(self, "nu", nu)
        if not 0 < nu < Fraction(17, 32):
            raise DomainError(f"nu={nu} outside (0, 17/32)")
        if self.c1 < 0 or not self.c1 < self.c2:
            raise DomainError(f"need 0 <= c1 < c2, got c1={self.c1}, c2={self.c2}")
        if self.u == 0:
            raise DomainError("residue shift u must be nonzero")
        if self.y < 2:
            raise DomainError("y must be at least 2")

    @property
    def p_max(self) -> int:
        return floor_root(self.y**self.nu.numerator, self.nu.denominator)


@dataclass(frozen=True)
class BTRow:
    p: int
    count: int
    low: float
    high: float
    is_exception: bool


@dataclass(frozen=True)
class BTScan:
    exception_count: int
    scanned_count: int
    rows: tuple[BTRow, ...]

    @property
    def exceptions(self) -> list[int]:
        return [r.p for r in self.rows if r.is_exception]


def theorem1_bound(x: float, alpha) -> float:
    """(1/2 + alpha) x / log x."""
    alpha = RationalExponent.of(alpha)
    if alpha.fraction > Fraction(1, 4):
        raise DomainError(f"alpha={alpha} outside [0, 1/4]")
    if x < math.e:
        raise DomainError("theorem1_bound needs x >= e")
    return float(Fraction(1, 2) + alpha.fraction) * x / math.log(x)


def theorem2_envelope(x: int, k: int, a, *, unsafe_exponent: bool = False) -> BoundEnvelope:
    a = RationalExponent.of(a)
    if k < 2:
        raise DomainError("k must be at least 2")
    if x < 16:
        raise DomainError("envelope needs x >= 16")
    if not unsafe_exponent and not Fraction(1, 2 * k) <= a.fraction < Fraction(17, 32 * k):
        raise DomainError(f"a={a} outside [1/{2 * k}, 17/{32 * k})")
    lx = math.log(x)
    main = x ** float(1 - a.fraction * (k - 1))
    return BoundEnvelope(x, k, a, main / lx ** (k + 1), main * math.log(lx) ** (k - 1) / lx**2)


def fit_exponent(series: list[SeriesPoint]) -> FitResult:
    """Unweighted least-squares line through (log x, log count)."""
    usable = [pt for pt in series if pt.count > 0]
    if len(usable) < len(series):
        log.warning("fit_exponent: dropped %d zero-count points", len(series) - len(usable))
    if len(usable) < 2:
        raise DomainError("need at least two points with positive counts")
    xs = np.log(np.array([pt.x for pt in usable], dtype=np.float64))
    ys = np.log(np.array([pt.count for pt in usable], dtype=np.float64))
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), len(usable))


def progression_counts(y: int, moduli: np.ndarray, u: int, config: SieveConfig | None = None) -> np.ndarray:
    """pi(y; p, u) for every p in ``moduli``.

    For u = 1 the count comes from the factor sieve: pi(y;p,1) is the number
    of primes q <= y with p | q - 1. Other shifts reduce each prime modulo p.
    """
    if u == 1:
        t = shifted_table(y, config).prefix(y)
        hist = np.bincount(t.factor_q[t.factor_q <= moduli.max(initial=1)], minlength=int(moduli.max(initial=1)) + 1)
        return hist[moduli]
    qs = prime_array(y, config)
    return np.array([np.count_nonzero(qs % p == u % p) for p in moduli.tolist()], dtype=np.int64)


def bt_exception_scan(w: BTWindow, config: SieveConfig | None = None) -> BTScan:
    """Primes p <= y^nu whose progression count leaves the open window."""
    pmax = w.p_max
    if pmax < 2:
        raise EmptyRangeError(f"y^nu = {w.y}^{w.nu} < 2: nothing to scan")
    moduli = prime_array(pmax, config)
    counts = progression_counts(w.y, moduli, w.u, config)
    scale = w.y / (moduli.astype(np.float64) * math.log(w.y))
    low, high = w.c1 * scale, w.c2 * scale
    bad = (counts <= low) | (counts >= high)
    rows = tuple(
        BTRow(p, c, lo, hi, b)
        for p, c, lo, hi, b in zip(moduli.tolist(), counts.tolist(), low.tolist(), high.tolist(), bad.tolist())
    )
    return BTScan(int(np.count_nonzero(bad)), len(rows), rows)
