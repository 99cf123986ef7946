from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qgext.coeffring import ONE, Q
from qgext.linalg import SparseSystem, independent_columns, inverse, rank_columns, solve_columns

entries = st.integers(-3, 3)


@st.composite
def dense(draw, rows=4, cols=4):
    r = draw(st.integers(1, rows))
    c = draw(st.integers(1, cols))
    return [[Fraction(draw(entries)) for _ in range(c)] for _ in range(r)]


def columns_of(M):
    return [{i: M[i][j] for i in range(len(M)) if M[i][j]} for j in range(len(M[0]))]


@given(dense())
def test_rank_matches_sympy(M):
    assert rank_columns(columns_of(M)) == sp.Matrix(M).rank()


@given(dense(), st.lists(entries, min_size=4, max_size=4))
def test_solution_is_exact(M, b):
    target = {i: Fraction(b[i]) for i in range(len(M)) if b[i]}
    x = solve_columns(columns_of(M), target)
    A = sp.Matrix(M)
    B = sp.Matrix([b[i] for i in range(len(M))])
    solvable = A.rank() == A.row_join(B).rank()
    assert (x is not None) == solvable
    if x is not None:
        for i in range(len(M)):
            assert sum(M[i][c] * v for c, v in x.items()) == b[i]


@given(dense())
@settings(max_examples=50)
def test_independent_columns(M):
    cols = columns_of(M)
    idx = independent_columns(cols)
    assert len(idx) == sp.Matrix(M).rank()
    assert rank_columns([cols[i] for i in idx]) == len(idx)


def test_ratfunc_system():
    # [[1, q], [q, 1]] x = [1, 0]
    cols = [{0: ONE, 1: Q}, {0: Q, 1: ONE}]
    x = solve_columns(cols, {0: ONE})
    d = ONE - Q * Q
    assert x == {0: ONE / d, 1: -Q / d}


def test_several_targets_one_elimination():
    cols = [{0: Fraction(1), 1: Fraction(1)}]
    s = SparseSystem(cols, [{0: Fraction(2), 1: Fraction(2)}, {0: Fraction(1)}])
    assert s.consistent(0) and not s.consistent(1)
    assert s.solution(0) == {0: Fraction(2)}
    assert s.solution(1) is None


def test_inverse_and_singular():
    m = {(0, 0): Fraction(2), (0, 1): Fraction(1), (1, 1): Fraction(1)}
    inv = inverse(m, [0, 1], Fraction(1))
    assert inv == {(0, 0): Fraction(1, 2), (0, 1): Fraction(-1, 2), (1, 1): Fraction(1)}
    with pytest.raises(ZeroDivisionError):
        inverse({(0, 0): Fraction(1), (0, 1): Fraction(1)}, [0, 1], Fraction(1))
