import pytest
from hypothesis import given, settings

from qgext.coeffring import ONE, Q
from qgext.freealg import (AlphabetMismatch, MissingImage, NCMatrix, NCPoly, TensorPoly, Word,
                           anti_hom_apply, coproduct, counit, format_ncpoly, gen, hom_apply,
                           parse_ncpoly, scalar, tensor_flatten3, tgen)
from strategies import ncpolys


def mono(N, w):
    return NCPoly(N, {w: ONE})


def delta_left(T):
    """(Delta (x) id) T as a map (a, b, c) -> coeff."""
    out = {}
    for (a, b), c in T.terms.items():
        for (a1, a2), v in coproduct(mono(T.N, a)).terms.items():
            out[((a1, a2), b)] = out.get(((a1, a2), b), 0) + v * c
    return tensor_flatten3(T.N, out)


def delta_right(T):
    out = {}
    for (a, b), c in T.terms.items():
        for (b1, b2), v in coproduct(mono(T.N, b)).terms.items():
            out[(a, (b1, b2))] = out.get((a, (b1, b2)), 0) + v * c
    return tensor_flatten3(T.N, out)


def test_generator_coproduct():
    d = coproduct(gen(2, 1, 2))
    expect = TensorPoly.pure(gen(2, 1, 1), gen(2, 1, 2)) + TensorPoly.pure(gen(2, 1, 2), gen(2, 2, 2))
    assert d == expect
    assert coproduct(tgen(2)) == TensorPoly.pure(tgen(2), tgen(2))


def test_counit_values():
    assert counit(gen(3, 2, 2)) == ONE
    assert counit(gen(3, 1, 2)) == 0
    assert counit(tgen(3) * gen(3, 1, 1) * Q) == Q


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        gen(2, 1, 1) + gen(3, 1, 1)
    with pytest.raises(IndexError):
        gen(2, 3, 1)


def test_missing_image():
    with pytest.raises(MissingImage):
        hom_apply({(1, 1): gen(2, 1, 1)}, None, gen(2, 1, 2))
    with pytest.raises(MissingImage):
        hom_apply({(1, 1): gen(2, 1, 1)}, None, tgen(2))


def test_matrix_product():
    V = NCMatrix.generic(2)
    P = V @ V
    assert P[1, 2] == gen(2, 1, 1) * gen(2, 1, 2) + gen(2, 1, 2) * gen(2, 2, 2)


def test_parse_examples():
    p = parse_ncpoly("q^-1 * V[1,2] V[2,1] - t^2 + 3/2", 2)
    assert p == Q.invert() * gen(2, 1, 2) * gen(2, 2, 1) - tgen(2, 2) + scalar(2, ONE * 3 / 2)


@given(ncpolys(N=3, max_len=3, tpow=2))
def test_format_parse_roundtrip(p):
    assert parse_ncpoly(format_ncpoly(p), 3) == p


@given(ncpolys(), ncpolys())
@settings(max_examples=50)
def test_coproduct_is_multiplicative(a, b):
    assert coproduct(a * b) == coproduct(a) * coproduct(b)


@given(ncpolys(max_len=3, tpow=1))
@settings(max_examples=50)
def test_coassociative(p):
    T = coproduct(p)
    assert delta_left(T) == delta_right(T)


@given(ncpolys(max_len=3, tpow=1))
def test_counit_axiom(p):
    T = coproduct(p)
    assert T.apply_left(counit) == p
    assert T.apply_right(counit) == p


@given(ncpolys(), ncpolys())
def test_counit_is_multiplicative(a, b):
    assert counit(a * b) == counit(a) * counit(b)


@given(ncpolys(), ncpolys())
@settings(max_examples=50)
def test_hom_and_antihom(a, b):
    images = {(i, j): gen(2, j, i) + gen(2, i, i) for i in (1, 2) for j in (1, 2)}
    assert hom_apply(images, None, a * b) == hom_apply(images, None, a) * hom_apply(images, None, b)
    assert anti_hom_apply(images, None, a * b) == anti_hom_apply(images, None, b) * anti_hom_apply(images, None, a)


def test_mul_t_and_degree():
    p = gen(2, 1, 1) * gen(2, 2, 2)
    assert p.mul_t(2).degree() == 4
    assert Word(((1, 1),), 1).degree == 2
