"""Exact cosine-polynomial algebra: examples, ring axioms, derivative rules."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duffing_freq.trig_series import Rational, TrigPoly, format_rational, parse_rational

HALF = Rational(1, 2)
QUARTER = Rational(1, 4)


def cos(k, c=1):
    return TrigPoly.cosine(k, c)


# ---------------------------------------------------------------------------
# construction and canonical form
# ---------------------------------------------------------------------------


def test_zero_coefficients_never_stored():
    p = TrigPoly({1: Rational(0), 2: Rational(3)})
    assert p.harmonics() == (2,)
    assert p.coefficient(1) == 0


def test_equality_is_by_canonical_map():
    assert TrigPoly({1: 1, 3: 0}) == cos(1)
    assert cos(1) != cos(2)
    assert TrigPoly.zero() == TrigPoly({5: 0})


def test_negative_harmonic_rejected():
    with pytest.raises(ValueError):
        TrigPoly({-1: 1})


def test_immutable():
    p = cos(1)
    with pytest.raises(AttributeError):
        p._c = {}


def test_constant_term_is_harmonic_zero():
    p = TrigPoly.constant(HALF)
    assert p.coefficient(0) == HALF
    assert p.max_harmonic() == 0


# ---------------------------------------------------------------------------
# operation examples
# ---------------------------------------------------------------------------


def test_add_linearity():
    assert cos(1) + cos(1) == cos(1, 2)


def test_add_cancellation():
    assert cos(1) + cos(1, -1) == TrigPoly.zero()
    assert (cos(1) + cos(1, -1)).is_zero()


def test_add_disjoint_harmonics():
    p = cos(1, Rational(3, 4)) + cos(3, QUARTER)
    assert dict(p.items()) == {1: Rational(3, 4), 3: QUARTER}


def test_mul_product_to_sum():
    assert cos(1) * cos(1) == TrigPoly({0: HALF, 2: HALF})
    assert cos(1) * cos(3) == TrigPoly({2: HALF, 4: HALF})


def test_mul_triple_angle():
    assert cos(1) * cos(1) * cos(1) == TrigPoly({1: Rational(3, 4), 3: QUARTER})


def test_second_derivative():
    assert cos(1).second_derivative() == cos(1, -1)
    assert cos(3).second_derivative() == cos(3, -9)
    assert TrigPoly.constant(HALF).second_derivative() == TrigPoly.zero()


def test_coefficient_queries():
    p = TrigPoly({1: Rational(3, 4), 3: QUARTER})
    assert p.coefficient(3) == QUARTER
    assert p.coefficient(5) == 0
    with pytest.raises(ValueError):
        p.coefficient(-1)


def test_scale_and_neg():
    p = cos(1) + cos(3, QUARTER)
    assert p.scale(2) == cos(1, 2) + cos(3, HALF)
    assert -p + p == TrigPoly.zero()
    assert 2 * p == p * 2 == p.scale(2)


def test_value_at_zero():
    assert (cos(1, Rational(-1, 32)) + cos(3, Rational(1, 32))).value_at_zero() == 0
    assert cos(1).value_at_zero() == 1


# ---------------------------------------------------------------------------
# rational helpers
# ---------------------------------------------------------------------------


def test_rational_string_round_trip():
    q = Rational(-21, 256)
    assert format_rational(q) == "-21/256"
    assert parse_rational("-21/256") == q
    assert parse_rational("3") == 3
    assert format_rational(Rational(2)) == "2/1"


def test_rational_always_lowest_terms():
    q = Rational(6, 8)
    assert (q.numerator, q.denominator) == (3, 4)
    assert Rational(1, 2) + Rational(1, 2) == 1


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------

rationals = st.fractions(
    min_value=-9, max_value=9, max_denominator=8
).map(lambda f: Rational(f.numerator, f.denominator))

trig_polys = st.dictionaries(
    st.integers(min_value=0, max_value=6), rationals, max_size=4
).map(TrigPoly)


@settings(max_examples=60, deadline=None)
@given(trig_polys, trig_polys)
def test_mul_commutative(a, b):
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(trig_polys, trig_polys, trig_polys)
def test_mul_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=40, deadline=None)
@given(trig_polys, trig_polys, trig_polys)
def test_mul_distributes_over_add(a, b, c):
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(trig_polys, trig_polys)
def test_add_commutative_and_zero(a, b):
    assert a + b == b + a
    assert a + TrigPoly.zero() == a


# independent first-derivative helper on sine series, test-only:
# d/dxi sum c_k cos(k xi) = sum (-k c_k) sin(k xi), stored as {k: coeff}


def _first_derivative(p):
    return {k: -k * c for k, c in p.items() if k != 0}


def _sin_mul(a, b):
    """Product of two sine series as a cosine TrigPoly:
    sin(j)sin(k) = (1/2)cos(|j-k|) - (1/2)cos(j+k)."""
    acc = {}
    for j, ca in a.items():
        for k, cb in b.items():
            c = ca * cb * HALF
            acc[abs(j - k)] = acc.get(abs(j - k), Rational(0)) + c
            acc[j + k] = acc.get(j + k, Rational(0)) - c
    return TrigPoly(acc)


@settings(max_examples=40, deadline=None)
@given(trig_polys, trig_polys)
def test_second_derivative_product_rule(a, b):
    lhs = (a * b).second_derivative()
    rhs = (
        a.second_derivative() * b
        + _sin_mul(_first_derivative(a), _first_derivative(b)).scale(2)
        + a * b.second_derivative()
    )
    assert lhs == rhs
