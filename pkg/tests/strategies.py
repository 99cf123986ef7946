"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

from qgext.coeffring import HalfLaurent, RatFunc
from qgext.freealg import NCPoly, Word

small = st.integers(-4, 4)


@st.composite
def laurent(draw, max_terms=3, exp=6):
    terms = draw(st.dictionaries(st.integers(-exp, exp), st.fractions(-5, 5, max_denominator=4),
                                 max_size=max_terms))
    return HalfLaurent(terms)


@st.composite
def ratfuncs(draw, nonzero=False):
    num = draw(laurent())
    den = draw(laurent().filter(lambda p: not p.is_zero()))
    if nonzero and num.is_zero():
        num = HalfLaurent.const(Fraction(draw(st.integers(1, 3))))
    return RatFunc(num, den)


@st.composite
def words(draw, N=2, max_len=3, tpow=0):
    letters = draw(st.lists(st.tuples(st.integers(1, N), st.integers(1, N)), max_size=max_len))
    return Word(tuple(letters), draw(st.integers(0, tpow)))


@st.composite
def ncpolys(draw, N=2, max_len=2, max_terms=3, tpow=0):
    ws = draw(st.lists(words(N, max_len, tpow), max_size=max_terms))
    cs = [RatFunc(draw(small)) for _ in ws]
    return NCPoly(N, dict(zip(ws, cs)))
