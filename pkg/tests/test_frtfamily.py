import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.combinatorics import Permutation

from qgext.coeffring import ONE, Q, qpow
from qgext.freealg import NCPoly, counit, gen, scalar, tgen
from qgext.frtfamily import (Presentation, UnsupportedVariant, apply_table, build_presentation,
                             compose_tables, frt_relations, inversions, k_relation_entries,
                             morphism_images, q_element, quantum_determinant, resolve_det_reading,
                             s_matrix, select_det_reading, variant_allowed)
from qgext.idealcheck import membership
from qgext.rmatrix import Series, build_R, rhat

RANKS = {("A", 2): 6, ("A", 3): 36, ("C", 2): 6, ("C", 4): 130, ("D", 4): 138, ("B", 3): 46}


def numeric_relation_rank(tag, N, q0=1.3):
    """Rank of the entries of Rh V1V2 - V1V2 Rh as vectors over degree-2 words."""
    Rh = rhat(build_R(Series(tag, N)))
    M = np.zeros((N ** 4, N ** 4))
    idx = {p: k for k, p in enumerate(itertools.product(range(1, N + 1), repeat=2))}
    # (V1V2)[(a,b),(c,d)] = V[a,c] V[b,d]; word index by (a,c,b,d)
    word = lambda a, c, b, d: (idx[(a, c)]) * N * N + idx[(b, d)]  # noqa: E731
    rows = 0
    for (a, b), (c, d) in itertools.product(idx, idx):
        row = np.zeros(N ** 4)
        for (e, f) in idx:
            x = Rh[((a, b), (e, f))]
            if x:
                row[word(e, c, f, d)] += float(x.evaluate(q0))
            y = Rh[((e, f), (c, d))]
            if y:
                row[word(a, e, b, f)] -= float(y.evaluate(q0))
        M[rows] = row
        rows += 1
    return np.linalg.matrix_rank(M, tol=1e-8)


@pytest.mark.parametrize("case", sorted(RANKS))
def test_relation_count(case):
    frt = frt_relations(rhat(build_R(Series(*case))), case[1])
    assert len(frt) == RANKS[case]
    assert numeric_relation_rank(*case) == RANKS[case]


def test_c2_is_sl_mu_2():
    # with mu = q^2 the standard rank-one relations hold
    frt = build_presentation("C", 2).frt
    a, b, c, d = (gen(2, i, j) for i, j in [(1, 1), (1, 2), (2, 1), (2, 2)])
    mu = Q * Q
    for p in [a * b - mu * b * a, a * c - mu * c * a, b * c - c * b,
              a * d - d * a - (mu - mu.invert()) * b * c]:
        assert membership(frt, p, 2).in_span
    assert not membership(frt, a * b - b * a, 2).in_span


def test_c2_cofactor():
    s = s_matrix(Series("C", 2))
    assert s[1, 1] == gen(2, 2, 2)
    assert s[1, 2] == -qpow(-2) * gen(2, 1, 2)
    assert s[2, 1] == -qpow(2) * gen(2, 2, 1)


def test_a2_determinant_forms():
    D = quantum_determinant(Series("A", 2))
    a, b, c, d = (gen(2, i, j) for i, j in [(1, 1), (1, 2), (2, 1), (2, 2)])
    assert D == a * d - Q * c * b
    frt = build_presentation("A", 2, "special").frt
    assert membership(frt, D - (d * a - Q.invert() * b * c), 2).in_span
    assert counit(D) == ONE


def test_det_reading_selection():
    rd, trace = select_det_reading(Series("D", 2))
    assert rd == "inverted" and trace["pairs"].startswith("counit")
    assert resolve_det_reading(Series("D", 4)) == "epsilon"
    assert resolve_det_reading(Series("A", 3)) is None
    assert quantum_determinant(Series("D", 2), reading="epsilon") == quantum_determinant(Series("D", 2), reading="inverted")


@given(st.permutations(range(1, 6)))
def test_inversions_match_sympy(p):
    assert inversions(tuple(p)) == Permutation([x - 1 for x in p]).inversions()


def test_variant_grid():
    assert not variant_allowed(Series("A", 3), "plain")
    assert not variant_allowed(Series("B", 3), "special")
    assert variant_allowed(Series("D", 4), "special-tilde")
    with pytest.raises(UnsupportedVariant):
        build_presentation("C", 2, "special")


def test_presentation_shapes():
    P = build_presentation("C", 4, "tilde")
    assert P.name == "USp~_q(4)" and P.has_t and P.generator_count == 17
    assert len(P.extra) == 32 and P.antipode_t == P.qelt
    assert build_presentation("D", 4, "special").name == "SO_q(4)"
    assert build_presentation("A", 3, "tilde").name == "U_q(3)"
    assert all(counit(g) == 0 for g in P.relations)


@pytest.mark.parametrize("tag,N,var", [("C", 2, "tilde"), ("A", 2, "special"), ("D", 4, "special")])
def test_json_roundtrip(tag, N, var):
    P = build_presentation(tag, N, var)
    Q2 = Presentation.from_json(P.to_json())
    assert Q2.frt == P.frt and Q2.extra == P.extra
    assert Q2.det == P.det and Q2.qelt == P.qelt and Q2.star == P.star
    assert Q2.dumps() == P.dumps()


def test_q_element_sides_agree():
    S = Series("B", 3)
    frt = build_presentation(S).frt
    q1 = q_element(S, 1, "Vs")
    assert membership(frt, q_element(S, 2, "sV") - q1, 2).in_span
    assert counit(q1) == ONE


def test_k_relation_orders():
    S = Series("C", 2)
    frt = build_presentation(S).frt
    good = k_relation_entries(S, "V1V2")
    assert all(membership(frt, p, 2).in_span for p in good.values())
    bad = k_relation_entries(S, "V2V1")
    assert sum(not membership(frt, p, 2).in_span for p in bad.values()) == 8


def test_morphism_tables():
    phi = morphism_images("phi", Series("C", 4))
    assert phi[(1, 1)] == scalar(2, 1) and phi[(1, 2)] == NCPoly(2)
    assert phi[(2, 3)] == gen(2, 1, 2)
    pt = morphism_images("phitilde", Series("C", 4))
    assert pt["t"] == tgen(2) and pt[(1, 1)] == q_element(Series("C", 2))
    assert morphism_images("phitilde", Series("C", 4), corner="delta")[(1, 1)] == scalar(2, 1)
    rho = morphism_images("rho", Series("C", 2))
    assert apply_table(rho, tgen(2) * gen(2, 1, 2)) == gen(2, 1, 2)
    comp = compose_tables(phi, morphism_images("rho", Series("C", 4)))
    assert comp[(2, 2)] == gen(2, 1, 1) and comp["t"] == scalar(2, 1)
    with pytest.raises(ValueError):
        morphism_images("psi", Series("C", 4))
