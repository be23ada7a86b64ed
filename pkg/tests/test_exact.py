from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from splab.errors import DomainError
from splab.exact import (
    RationalExponent,
    ceil_power,
    compare_powers,
    factorize,
    floor_power,
    floor_root,
    is_prime,
    largest_prime_factor,
)
from oracles import naive_primes, trial_factor


class TestRationalExponent:
    def test_parse(self):
        assert RationalExponent.parse("1/4") == RationalExponent(1, 4)
        assert RationalExponent.parse(" 0 ") == RationalExponent(0, 1)
        assert RationalExponent.of(Fraction(2, 8)) == RationalExponent(1, 4)

    @pytest.mark.parametrize("bad", ["0.25", "1e-1", "x", "1/0", "5/4", "-1/4"])
    def test_parse_rejects(self, bad):
        with pytest.raises(DomainError):
            RationalExponent.parse(bad)

    def test_not_lowest_terms(self):
        with pytest.raises(DomainError):
            RationalExponent(2, 8)

    def test_float_rejected(self):
        with pytest.raises(DomainError):
            RationalExponent.of(0.25)


def test_roots_boundaries():
    assert floor_root(16, 4) == 2
    assert floor_root(15, 4) == 1
    assert floor_power(30, "1/2") == 5
    assert ceil_power(30, "1/2") == 6
    assert ceil_power(256, "1/2") == 16
    assert ceil_power(10**6, "1/4") == 32


@given(st.integers(1, 10**12), st.integers(1, 9), st.integers(1, 9))
def test_floor_ceil_power(x, num, den):
    e = Fraction(min(num, den), max(num, den))
    lo, hi = floor_power(x, e), ceil_power(x, e)
    n, d = e.numerator, e.denominator
    assert lo**d <= x**n < (lo + 1) ** d
    assert hi**d >= x**n > (hi - 1) ** d


@given(
    st.lists(st.tuples(st.integers(1, 10**6), st.integers(1, 10**6)), min_size=1, max_size=40),
    st.integers(1, 12),
    st.integers(1, 12),
)
def test_compare_powers_matches_integers(pairs, e1, e2):
    b = np.array([p[0] for p in pairs])
    o = np.array([p[1] for p in pairs])
    got = compare_powers(b, e1, o, e2)
    want = [(bb**e1 > oo**e2) - (bb**e1 < oo**e2) for bb, oo in pairs]
    assert got.tolist() == want


def test_compare_powers_exact_ties():
    # 2^40 = 4^20 = 1024^4; float logs put these right on the boundary
    got = compare_powers(np.array([2, 4, 1024, 1025]), 40, np.array([4, 2, 4, 4]), 20)
    assert got.tolist() == [0, 1, 1, 1]
    assert compare_powers(1024, 4, 4, 20).item() == 0
    assert compare_powers(10**6 + 1, 2, 10**12, 1).item() == 1


def test_factorize_against_trial_division():
    for n in range(0, 5000):
        assert factorize(n) == (trial_factor(n) if n > 1 else [])


def test_largest_prime_factor_convention():
    assert [largest_prime_factor(n) for n in (-1, 0, 1, 2, 22, 28, 97 * 89)] == [1, 1, 1, 2, 11, 7, 97]


def test_is_prime():
    primes = set(naive_primes(3000))
    assert [n for n in range(3001) if is_prime(n)] == sorted(primes)
    assert is_prime(2**31 - 1)
    assert not is_prime((2**31 - 1) * 3)
