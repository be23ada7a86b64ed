"""Quick built-in checks on small hand-verifiable cases; one line per check."""

from __future__ import annotations

import math

from .asymptotics import BTWindow, bt_exception_scan
from .exact import RationalExponent
from .products import EnumMode, brute_enumerate, is_member, l_k_sum, progression_enumerate
from .shifted import XPower, count_N_alpha, l_sum, m_sum
from .sieve import SieveConfig, enumerate_primes


def _checks():
    half = RationalExponent(1, 2)
    yield "primes <= 10", list(enumerate_primes(SieveConfig(10))) == [2, 3, 5, 7]
    yield "N_0(30) = 5", count_N_alpha(30, 0).count == 5
    yield "M_1/2(30) = log 77", math.isclose(m_sum(30, half).value, math.log(77), rel_tol=1e-12)
    yield "L(30;1,30) = sum log(p-1)", math.isclose(
        l_sum(30, 1, 30).value, math.log(1021870080), rel_tol=1e-12
    )
    yield "L(30;sqrt 30,30)", math.isclose(
        l_sum(30, XPower(30, half), 30).value, math.log(11 * 7 * 4 * 3), rel_tol=1e-12
    )
    yield "(11,31) in A_{2,1/4}", is_member([11, 31], "1/4").member
    for mode, want in ((EnumMode.MULTIPLICITY, 3), (EnumMode.DISTINCT, 1)):
        got = {f(100, 2, "1/4", mode).count for f in (brute_enumerate, progression_enumerate)}
        yield f"A_2,1/4(100) {mode.value} = {want}", got == {want}
    yield "L_2(35) = 4 log 2", math.isclose(l_k_sum(35, 2).value, 4 * math.log(2), rel_tol=1e-12)
    scan = bt_exception_scan(BTWindow(100, RationalExponent(1, 2).fraction, 0.5, 1.5))
    yield "BT window y=100 exceptions {2,3}", scan.exceptions == [2, 3]


def run_selftest() -> int:
    failed = 0
    for name, ok in _checks():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += not ok
    return 1 if failed else 0
