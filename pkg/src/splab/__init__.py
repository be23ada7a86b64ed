"""Sieve-based toolkit for shifted primes p whose p-1 has a large prime factor,
and for products of such primes."""

__version__ = "0.1.0"

from .errors import (
    CostGuardError,
    DomainError,
    EmptyRangeError,
    EngineDisagreement,
    InvalidModulusError,
    SplabError,
)
from .exact import RationalExponent

__all__ = [
    "__version__",
    "CostGuardError",
    "DomainError",
    "EmptyRangeError",
    "EngineDisagreement",
    "InvalidModulusError",
    "RationalExponent",
    "SplabError",
]
