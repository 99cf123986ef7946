import json
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgext.coeffring import ONE, RatFunc
from qgext.freealg import NCPoly, TensorPoly, gen
from qgext.frtfamily import build_presentation
from qgext.idealcheck import (BoundTooSmall, BudgetExceeded, MembershipProblem, battery,
                              battery_report, membership, mutate_relations, replay,
                              tensor_membership)
from strategies import ncpolys, words

SCHEMA = json.loads((Path(__file__).parents[1] / "report.schema.json").read_text())

N = 2
LETTERS = [(i, j) for i in (1, 2) for j in (1, 2)]
COMMUTATORS = [gen(N, *a) * gen(N, *b) - gen(N, *b) * gen(N, *a)
               for k, a in enumerate(LETTERS) for b in LETTERS[k + 1:]]


def abelian(p: NCPoly) -> dict:
    acc = {}
    for w, c in p.terms.items():
        key = (tuple(sorted(w.letters)), w.tpow)
        acc[key] = acc.get(key, 0) + c
    return {k: v for k, v in acc.items() if v}


def mono(w):
    return NCPoly(N, {w: ONE})


@given(ncpolys(N=2, max_len=3, max_terms=4))
@settings(max_examples=60)
def test_commutator_ideal_oracle(p):
    bound = max(p.degree(), 2)
    rep = membership(COMMUTATORS, p, bound)
    assert rep.in_span == (not abelian(p))


@st.composite
def ideal_elements(draw, gens):
    acc = NCPoly(N)
    for _ in range(draw(st.integers(1, 3))):
        A = draw(words(N, 1))
        B = draw(words(N, 1))
        g = gens[draw(st.integers(0, len(gens) - 1))]
        acc = acc + mono(A) * g * mono(B) * RatFunc(draw(st.integers(-3, 3)))
    return acc


C2 = build_presentation("C", 2)


@given(ideal_elements(C2.frt))
@settings(max_examples=40)
def test_constructed_members_are_certified(p):
    rep = membership(C2.frt, p, max(2, p.degree()))
    assert rep.in_span
    assert replay(C2.frt, rep.certificate, N) == p


@given(ideal_elements(C2.frt))
@settings(max_examples=20)
def test_monotone_in_bound(p):
    b = max(2, p.degree())
    assert membership(C2.frt, p, b + 1).in_span


def test_non_member_and_bound_errors():
    a, b = gen(N, 1, 1), gen(N, 1, 2)
    rep = membership(C2.frt, a * b - b * a, 2)
    assert not rep.in_span and rep.verdict == "not-certified-within-bound"
    with pytest.raises(BoundTooSmall):
        membership(C2.frt, a * b * a, 2)
    with pytest.raises(ValueError):
        membership([NCPoly(N)], a, 2)


def test_problem_object_and_digest():
    p = gen(N, 2, 2) * C2.frt[0]
    r1 = membership(MembershipProblem(C2.frt, p, 3))
    r2 = membership(C2.frt, p, 3, fast=False)
    assert r1.in_span and r2.in_span
    assert r1.digest() == membership(C2.frt, p, 3).digest()


def test_budget():
    with pytest.raises(BudgetExceeded):
        membership(C2.frt, gen(N, 1, 1) * C2.frt[0] * gen(N, 2, 1), 4, max_columns=3)


@given(ideal_elements(C2.frt), ncpolys(N=2, max_len=2, max_terms=2))
@settings(max_examples=25)
def test_tensor_members(g, w):
    T = TensorPoly.pure(g, w) + TensorPoly.pure(w, g)
    if not T.terms:
        return
    rep = tensor_membership(T, C2.frt)
    assert rep.in_span


def test_tensor_non_member():
    x = gen(N, 1, 2) * gen(N, 1, 1)
    assert not tensor_membership(TensorPoly.pure(x, x), C2.frt).in_span


def test_battery_c2_tilde_all_pass():
    res = battery(build_presentation("C", 2, "tilde"))
    assert res and all(r.passed for r in res), [r.name for r in res if not r.passed]
    names = {r.name for r in res}
    assert {"a.vs-identity", "b.centrality", "d.biideal", "g.s2-law", "h.unitarity", "i.rho"} <= names
    doc = {"tool": "qgext", "version": "0", "command": "verify", "config": {},
           "checks": [r.to_json() for r in res], "all_passed": True}
    jsonschema.validate(doc, SCHEMA)
    assert battery_report(res)["all_passed"]


def test_battery_is_deterministic():
    P = build_presentation("A", 2, "special")
    d1 = [(r.name, r.certificate_digest) for r in battery(P, checks="abg")]
    d2 = [(r.name, r.certificate_digest) for r in battery(P, checks="abg")]
    assert d1 == d2


def test_battery_flags_wrong_antipode():
    P = build_presentation("C", 2)
    P.antipode = dict(P.antipode)
    P.antipode[(1, 2)] = -P.antipode[(1, 2)]
    res = {r.name: r for r in battery(P, checks="f")}
    assert res["f.antipode"].verdict == "not-certified-within-bound"
    assert res["f.antipode"].witness


def test_mutate_relations():
    gm, (gi, w) = mutate_relations(C2.frt, 3)
    assert gm[gi].terms[w] == -C2.frt[gi].terms[w]
    assert sum(a != b for a, b in zip(gm, C2.frt)) == 1
