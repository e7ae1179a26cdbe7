import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arcocycle.arithmetic import (PrecisionExhausted, approximation_error, beta_estimate,
                                  convergents_from_quotients, expand, liouville_approximant,
                                  parse_frequency)
from oracles import fibonacci


def test_golden_fibonacci():
    cf = expand("golden", 15)
    assert cf.a == [0] + [1] * 14
    assert cf.denominators == fibonacci(15)


def test_decimal_golden_string():
    cf = expand("0.6180339887", 12)
    assert cf.denominators == fibonacci(12)


def test_silver():
    cf = expand("silver", 8)
    assert cf.a == [0] + [2] * 7
    assert cf.denominators[:5] == [1, 2, 5, 12, 29]


def test_rational_terminates():
    cf = expand(Fraction(1, 3), 10)
    assert cf.a == [0, 3] and cf.terminated


def test_float_rejected():
    with pytest.raises(TypeError):
        parse_frequency(0.5)


def _check_invariants(cf):
    conv = cf.convergents
    for p, q in conv:
        assert math.gcd(p, q) == 1
    for n in range(2, len(cf.a)):
        assert conv[n][1] == cf.a[n] * conv[n - 1][1] + conv[n - 2][1]
        assert conv[n][0] == cf.a[n] * conv[n - 1][0] + conv[n - 2][0]
    with mpmath.workprec(cf.prec):
        for n in range(len(conv) - 1):
            p, q = conv[n]
            q1 = conv[n + 1][1]
            err = approximation_error(cf, p, q)
            if err == 0:
                continue
            assert mpmath.mpf(1) / (q * (q + q1)) < err
            if cf.terminated and n == len(conv) - 2:
                # alpha equals the last convergent, so the upper bound is attained
                assert err <= mpmath.mpf(1) / (q * q1)
            else:
                assert err < mpmath.mpf(1) / (q * q1)


@pytest.mark.parametrize("name", ["golden", "silver", "sqrt2", "e", "pi"])
def test_named_invariants(name):
    _check_invariants(expand(name, 25))


@given(st.integers(1, 10 ** 9), st.integers(1, 10 ** 9))
def test_rational_reconstruction(p, q):
    x = Fraction(p, q)
    cf = expand(x, 200)
    assert cf.terminated
    assert Fraction(*cf.convergents[-1]) == x
    _check_invariants(cf)


@given(st.lists(st.integers(1, 50), min_size=2, max_size=20))
def test_quotients_round_trip(a):
    a = [0] + a
    if a[-1] == 1:
        a[-1] = 2      # canonical form
    p, q = convergents_from_quotients(a)[-1]
    assert expand(Fraction(p, q), 100).a == a


def test_beta_estimate_golden():
    cf = expand("golden", 10)
    assert beta_estimate(cf) == pytest.approx(math.log(2), rel=1e-12)


def test_beta_estimate_engineered_liouville_prefix():
    a = [0, 1, 10 ** 6, 1, 1]
    cf = expand(Fraction(*convergents_from_quotients(a)[-1]), 10)
    assert beta_estimate(cf) >= math.log(10 ** 6) - 1e-9


@given(st.integers(1, 10 ** 6), st.integers(1, 10 ** 6))
def test_beta_estimate_nonnegative(p, q):
    cf = expand(Fraction(p, q) + 0, 50)
    if len(cf.convergents) >= 2:
        assert beta_estimate(cf) >= 0


def test_liouville_golden_empty_beyond_small_q():
    cf = expand("golden", 22)       # q up to 17711
    found = liouville_approximant(cf, 0.1)
    assert found and max(q for _, q in found) == 89
    with mpmath.workprec(cf.prec):
        for p, q in cf.convergents:
            if 144 <= q <= 10 ** 4:
                assert approximation_error(cf, p, q) * mpmath.exp(mpmath.mpf(0.1) * q) > 1


def test_liouville_doubly_exponential_nonempty():
    # alpha = 2^-1 + 2^-4 + 2^-32 + 2^-80: the convergent 9/16 has error
    # about 2^-32, far below e^-16
    with mpmath.workprec(2048):
        x = sum(mpmath.mpf(2) ** -t for t in (1, 4, 32, 80))
    cf = expand(x, 12, prec=2048)
    found = liouville_approximant(cf, 1.0)
    assert (9, 16) in found


def test_liouville_rational_exact():
    cf = expand(Fraction(5, 13), 10)
    assert (5, 13) in liouville_approximant(cf, 100.0)


def test_precision_exhausted_keeps_prefix():
    with pytest.raises(PrecisionExhausted) as info:
        expand("golden", 400, prec=128)
    assert info.value.prefix[:5] == [0, 1, 1, 1, 1]
