from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qgext.coeffring import ONE, ZERO, HalfLaurent, PoleError, Q, U, parse_ratfunc, qpow, qpow_half
from strategies import laurent, ratfuncs


def to_sympy(r, u):
    num = sum(sp.Rational(c.numerator, c.denominator) * u ** e for e, c in r.num.terms.items())
    den = sum(sp.Rational(c.numerator, c.denominator) * u ** e for e, c in r.den.terms.items())
    return num / den


def test_q_is_u_squared():
    assert U * U == Q
    assert qpow(1) == Q
    assert qpow(Fraction(1, 2)) == U
    assert qpow_half(-3) * qpow_half(3) == ONE


def test_qpow_rejects_quarter():
    with pytest.raises(ValueError):
        qpow(Fraction(1, 4))


def test_canonical_form_is_syntactic():
    a = (Q * Q - 1) / (Q - 1)
    assert a == Q + 1
    assert hash(a) == hash(Q + 1)
    assert (Q - Q.invert()) / (Q + Q.invert()) == (Q * Q - 1) / (Q * Q + 1)


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO
    with pytest.raises(ZeroDivisionError):
        ZERO.invert()


def test_pole_on_evaluation():
    r = ONE / (Q - 1)
    with pytest.raises(PoleError):
        r.evaluate(1)
    assert r.evaluate(3) == Fraction(1, 2)


def test_exact_evaluation_at_square():
    # u**3 at q = 4/9 is (2/3)**3
    assert qpow_half(3).evaluate(Fraction(4, 9)) == Fraction(8, 27)
    assert abs(qpow_half(1).evaluate(2) - 2 ** 0.5) < 1e-15


def test_parse_examples():
    assert parse_ratfunc("q^2 - 1") == Q * Q - 1
    assert parse_ratfunc("1/(q - q^-1)") == (Q - Q.invert()).invert()
    assert parse_ratfunc("u^3") == qpow_half(3)
    assert parse_ratfunc("-2/3*q^(1/2)") == U * Fraction(-2, 3)


@given(ratfuncs(), ratfuncs())
def test_field_axioms(a, b):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) - b == a
    assert a * (b + ONE) == a * b + a
    if b:
        assert (a / b) * b == a


@given(ratfuncs(), ratfuncs(), ratfuncs())
@settings(max_examples=40)
def test_associativity(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)


@given(ratfuncs())
def test_str_parse_roundtrip(a):
    assert parse_ratfunc(str(a)) == a


@given(ratfuncs(), ratfuncs())
@settings(max_examples=40)
def test_product_matches_sympy(a, b):
    u = sp.symbols("u")
    assert sp.simplify(to_sympy(a * b, u) - to_sympy(a, u) * to_sympy(b, u)) == 0
    assert sp.simplify(to_sympy(a + b, u) - to_sympy(a, u) - to_sympy(b, u)) == 0


@given(laurent(), laurent())
def test_evaluation_is_a_homomorphism(p, r):
    u0 = Fraction(3, 2)
    assert (p * r).evaluate(u0) == p.evaluate(u0) * r.evaluate(u0)
    assert (p + r).evaluate(u0) == p.evaluate(u0) + r.evaluate(u0)


@given(st.integers(-10, 10), st.integers(-10, 10))
def test_qpow_exponent_law(a, b):
    assert qpow(a) * qpow(b) == qpow(a + b)
    assert qpow_half(a) ** 2 == qpow(a)


def test_halflaurent_basics():
    p = HalfLaurent({-2: 1, 3: Fraction(1, 2)})
    assert p.min_exp() == -2 and p.max_exp() == 3
    assert not HalfLaurent({1: 0})
