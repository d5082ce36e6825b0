"""Interval arithmetic: containment, rounding direction, serialization."""

from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noble.intervals import (
    Interval,
    decimal_string,
    from_fraction,
    fsum,
    parse_decimal,
)

# strategy: rationals with moderate numerators so cross-multiplication
# checks stay fast
fractions = st.fractions(
    min_value=Fraction(-1000), max_value=Fraction(1000), max_denominator=997)
nonzero_fractions = fractions.filter(lambda f: abs(f) > Fraction(1, 50))


def test_exact_integers_are_points():
    iv = Interval.exact(7)
    assert iv.lo == iv.hi == 7
    assert iv.width() == 0.0


def test_scalar_constructor_rounds_outward():
    third = Interval(Fraction(1, 3))
    assert third.lo < third.hi
    assert third.contains(Fraction(1, 3))
    # enclosure is tight at working precision
    assert third.width() < 1e-35


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        Interval(2, 1)


@given(fractions, fractions)
def test_add_sub_contain_exact(a, b):
    A, B = from_fraction(a), from_fraction(b)
    assert (A + B).contains(a + b)
    assert (A - B).contains(a - b)


@given(fractions, fractions)
def test_mul_contains_exact(a, b):
    assert (from_fraction(a) * from_fraction(b)).contains(a * b)


@given(fractions, nonzero_fractions)
def test_div_contains_exact(a, b):
    assert (from_fraction(a) / from_fraction(b)).contains(a / b)


@given(fractions, st.integers(min_value=0, max_value=8))
def test_pow_contains_exact(a, n):
    assert (from_fraction(a) ** n).contains(a ** n)


def test_pow_even_crossing_zero():
    iv = Interval(-1, 2) ** 2
    assert iv.lo == 0
    assert iv.contains(4)
    neg = Interval(-3, -2) ** 2
    assert neg.contains(4) and neg.contains(9)
    assert not neg.contains(Fraction(7, 2))


def test_div_by_zero_interval_raises():
    with pytest.raises(ZeroDivisionError):
        Interval(1) / Interval(-1, 1)


def test_intersect_and_disjoint():
    a = Interval(0, 2)
    b = Interval(1, 3)
    c = a.intersect(b)
    assert c.contains(Fraction(3, 2))
    with pytest.raises(ValueError):
        Interval(0, 1).intersect(Interval(2, 3))


def test_hull():
    h = Interval.hull(Interval(0, 1), Interval(5, 6), 3)
    assert h.contains(0) and h.contains(6) and h.contains(3)


def test_pi_bracket():
    p = Interval.pi()
    lo, hi = p.to_fractions()
    assert Fraction(31415926535897932, 10 ** 16) < hi
    assert lo < Fraction(31415926535897933, 10 ** 16)
    assert p.width() < 1e-34


@given(st.fractions(min_value=Fraction(-20), max_value=Fraction(20),
                    max_denominator=499))
def test_exp_log_roundtrip_contains(a):
    e = from_fraction(a).exp()
    assert e.lo > 0
    back = e.log()
    assert back.contains(a)


@given(st.fractions(min_value=Fraction(0), max_value=Fraction(1000),
                    max_denominator=499))
def test_sqrt_square_contains(a):
    r = from_fraction(a).sqrt()
    assert (r * r).contains(a)


def test_comparisons():
    assert Interval(1, 2).strictly_less(Interval(3, 4))
    assert not Interval(1, 3).strictly_less(Interval(2, 4))
    assert Interval(1, 2).certainly_leq(2)
    assert Interval(1, 2).certainly_geq(1)
    assert not Interval(1, 2).certainly_leq(Fraction(3, 2))


def test_fsum_matches_pairwise():
    items = [Interval(Fraction(1, k)) for k in range(1, 40)]
    total = fsum(items)
    exact = sum(Fraction(1, k) for k in range(1, 40))
    assert total.contains(exact)


# -- serialization ----------------------------------------------------------

@given(fractions)
@settings(max_examples=200)
def test_decimal_string_roundtrip(a):
    x = from_fraction(a).lo
    s = decimal_string(x)
    y = parse_decimal(s)
    assert y == x, (s, float(x))


def test_decimal_string_is_exact_for_dyadics():
    x = gmpy2.mpfr("0.15625")  # 5/32, exactly representable
    assert decimal_string(x) == "0.15625"
    assert decimal_string(gmpy2.mpfr(-3)) == "-3"


def test_decimal_string_deterministic():
    x = from_fraction(Fraction(1, 3)).hi
    assert decimal_string(x) == decimal_string(x)
