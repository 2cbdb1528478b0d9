import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tournacolor.exact import (LogRatio, Monomial, ceil_times_power, coloring_bound_holds, iroot_floor,
                               power_at_least, power_at_least_real)

pos = st.fractions(min_value=Fraction(1, 1000), max_value=1000)


@given(pos, pos)
def test_monomial_order_matches_fractions(a, b):
    assert (Monomial.of(a) < Monomial.of(b)) == (a < b)
    assert (Monomial.of(a) == Monomial.of(b)) == (a == b)


@given(pos, pos)
def test_monomial_product_round_trips(a, b):
    assert (Monomial.of(a) * b).to_fraction() == a * b
    assert (Monomial.of(a) / b).to_fraction() == a / b


def test_huge_powers_compare():
    big = Monomial.pow2(2 ** 201)
    assert big > Monomial.pow2(2 ** 200) * 3 ** 1000
    assert Monomial.pow2(-(2 ** 18)) < Fraction(1, 10 ** 9)


def test_irrational_comparison():
    # 2^(1/2) < 3^(1/3)? 2^3 = 8 < 9 = 3^2
    assert Monomial({2: Fraction(1, 2)}) < Monomial({3: Fraction(1, 3)})


@given(st.integers(0, 10 ** 30), st.integers(1, 7))
def test_iroot_floor(x, q):
    s = iroot_floor(x, q)
    assert s ** q <= x < (s + 1) ** q


@given(pos, st.integers(1, 500), st.fractions(min_value=Fraction(1, 50), max_value=1))
def test_ceil_times_power(c, n, eps):
    v = ceil_times_power(c, n, eps)
    # v - 1 < c n^eps <= v, checked in the q-th power domain
    assert power_at_least(v, n, eps) or Monomial.of(v) >= Monomial.of(c) * Monomial.of(n) ** eps
    assert Monomial.of(v) >= Monomial.of(c) * Monomial.of(n) ** eps
    assert v == 1 or Monomial.of(v - 1) < Monomial.of(c) * Monomial.of(n) ** eps


def test_log_ratio():
    r = LogRatio(4, 16)
    assert float(r) == pytest.approx(0.5)
    assert power_at_least_real(4, 16, r)
    assert not power_at_least_real(3, 16, r)
    assert power_at_least_real(6, 128, LogRatio(6, 128))
    with pytest.raises(ValueError):
        LogRatio(0, 4)


@given(st.integers(2, 400), st.integers(1, 400))
def test_coloring_bound_matches_float(n, colors):
    g = max(math.ceil(math.log2(n)) - 1, 1)
    exact = coloring_bound_holds(n, colors, LogRatio(g, n))
    bound = n / g * math.log2(n)
    if abs(colors - bound) > 1e-6:
        assert exact == (colors <= bound)


def test_coloring_bound_rational():
    assert coloring_bound_holds(16, 16, Fraction(1, 2))  # 4 * 4
    assert not coloring_bound_holds(16, 17, Fraction(1, 2))
