"""Presentations of the FRT quotients and their central extensions.

A :class:`Presentation` bundles the generators V[i,j] (and t for the tilde
variants), the list of ideal generators, and the Hopf data: cofactor matrix,
quantum determinant, the central element Q, antipode and star tables.

Variants per series:

=====  =========================  ==========================  =====================
tag    plain                      special                     tilde / special-tilde
=====  =========================  ==========================  =====================
A      --                         SU_q(n): <D - 1>            U_q(n): <tD - 1>
C      USp_q(2n): I1              --                          J1
D      O_q(2n): I2                SO_q(2n): I3                J2 / J3
B      O_q(2n+1): I2              unsupported (odd det)       J2 / --
=====  =========================  ==========================  =====================
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache

from . import linalg
from .coeffring import ONE, ZERO, Q, qpow
from .freealg import (
    NCMatrix,
    NCPoly,
    Word,
    counit,
    format_ncpoly,
    gen,
    hom_apply,
    parse_ncpoly,
    scalar,
    tgen,
)
from .rmatrix import RTensor, Series, build_R, rho, rhat

__all__ = [
    "VARIANTS",
    "Presentation",
    "UnsupportedVariant",
    "frt_relations",
    "frt_relations_raw",
    "tensor_relations_raw",
    "s_matrix",
    "s_matrix_forms",
    "inversions",
    "r_statistic",
    "quantum_determinant",
    "q_epsilon",
    "select_det_reading",
    "DET_READINGS",
    "q_element",
    "ideal_generators",
    "antipode_images",
    "star_images",
    "morphism_images",
    "compose_tables",
    "build_presentation",
    "resolve_det_reading",
    "variant_allowed",
]

VARIANTS = ("plain", "special", "tilde", "special-tilde")

_ALLOWED = {
    "A": ("special", "tilde"),
    "B": ("plain", "tilde"),
    "C": ("plain", "tilde"),
    "D": ("plain", "special", "tilde", "special-tilde"),
}


class UnsupportedVariant(ValueError):
    pass


def variant_allowed(series: Series, variant: str) -> bool:
    return variant in _ALLOWED[series.tag]


def _check_variant(series: Series, variant: str):
    if variant not in VARIANTS:
        raise UnsupportedVariant(f"unknown variant {variant!r}")
    if not variant_allowed(series, variant):
        if series.tag == "B" and variant == "special":
            raise UnsupportedVariant("SO_q(2n+1) needs the odd-case quantum determinant, which is not supported")
        raise UnsupportedVariant(f"variant {variant!r} is not defined for series {series.tag}")


# FRT relations ----------------------------------------------------------------

def tensor_relations_raw(T: RTensor, N: int, order: str = "V1V2") -> dict:
    """All N^4 entries of T V1 V2 - W T, keyed by ((a,b),(c,d)).

    ``order="V1V2"``: W = V1 V2, entries V[a,k] V[b,l];
    ``order="V2V1"``: W = V2 V1, entries V[b,l] V[a,k].
    """
    rows: dict = {}
    cols: dict = {}
    for (r, c), v in T.entries.items():
        rows.setdefault(r, []).append((c, v))
        cols.setdefault(c, []).append((r, v))
    out = {}
    rng = range(1, N + 1)
    for a, b, c, d in itertools.product(rng, rng, rng, rng):
        t: dict = {}
        for (k, l), v in rows.get((a, b), ()):
            w = Word(((k, c), (l, d)), 0)
            t[w] = t.get(w, ZERO) + v
        for (k, l), v in cols.get((c, d), ()):
            if order == "V1V2":
                w = Word(((a, k), (b, l)), 0)
            else:
                w = Word(((b, l), (a, k)), 0)
            t[w] = t.get(w, ZERO) - v
        out[((a, b), (c, d))] = NCPoly(N, t)
    return out


def k_relation_entries(series: Series, order: str = "V1V2") -> dict:
    """Nonzero entries of K V1 V2 - V1 V2 K (``order="V1V2"``) or of
    K V1 V2 - V2 V1 K (``order="V2V1"``) for the explicit K tensor."""
    from .rmatrix import ktensor_explicit
    ents = tensor_relations_raw(ktensor_explicit(series), series.N, order)
    return {k: p for k, p in ents.items() if p}


def frt_relations_raw(Rh: RTensor, N: int, form: str = "standard") -> dict:
    """Entries of Rh V1 V2 - V1 V2 Rh (equivalently R V1 V2 - V2 V1 R).

    ``form="literal"`` gives Rh V1 V2 - V2 V1 Rh instead, which is a strictly
    larger set of relations (it is not equivalent to the R form).
    """
    return tensor_relations_raw(Rh, N, "V1V2" if form == "standard" else "V2V1")


def _normalize(p: NCPoly) -> NCPoly:
    w = p.words()[0]
    return p * p.terms[w].invert()


def frt_relations(Rh: RTensor, N: int, form: str = "standard") -> list[NCPoly]:
    """A basis (over the coefficient field) of the span of the FRT entries.

    Zero entries and scalar multiples are dropped first; the remaining
    candidates are thinned to an independent subset by exact elimination, so
    the returned list spans exactly what the full N^4 set spans.
    """
    seen = set()
    cands = []
    raw = frt_relations_raw(Rh, N, form)
    for key in sorted(raw):
        p = raw[key]
        if not p:
            continue
        p = _normalize(p)
        h = frozenset(p.terms.items())
        if h in seen:
            continue
        seen.add(h)
        cands.append(p)
    chosen = linalg.independent_columns([dict(p.terms) for p in cands])
    return [cands[i] for i in chosen]


@lru_cache(maxsize=None)
def _frt_for_series(series: Series) -> tuple:
    Rh = rhat(build_R(series))
    return Rh, tuple(frt_relations(Rh, series.N))


# permutations -----------------------------------------------------------------

def inversions(seq) -> int:
    """Number of pairs a < b with seq[a] > seq[b]."""
    s = list(seq)
    return sum(1 for a in range(len(s)) for b in range(a + 1, len(s)) if s[a] > s[b])


def r_statistic(sigma: tuple, n: int, reading: str = "pairs") -> int:
    """The statistic r(sigma) weighting the type C/D determinant.

    ``sigma`` is a tuple with sigma[i-1] = sigma(i) on {1..2n}.  For
    position i let j = sigma^{-1}(2n + 1 - sigma(i)).

    * ``pairs``: count i in 1..2n with sigma(j) > sigma(i), i.e. each
      conjugate pair once.
    * ``literal``: the same count restricted to i <= n.
    * ``inverted``: count conjugate value pairs {a, 2n+1-a} (a <= n) that
      appear in reversed order, i.e. position of a after position of a'.
    """
    N = 2 * n
    inv = {v: k + 1 for k, v in enumerate(sigma)}
    if reading == "inverted":
        return sum(1 for a in range(1, n + 1) if inv[a] > inv[N + 1 - a])
    top = N if reading == "pairs" else n
    count = 0
    for i in range(1, top + 1):
        j = inv[N + 1 - sigma[i - 1]]
        if sigma[j - 1] > sigma[i - 1]:
            count += 1
    return count


# cofactors, determinants, Q ---------------------------------------------------

def _minor_sum(N: int, omit_pos: int, omit_val: int, columns: bool, qf) -> NCPoly:
    """sum over bijections tau: {1..N}\\{omit_pos} -> {1..N}\\{omit_val} of
    (-q)^inv(tau) * prod_k V[tau(k), k] (columns=True) or V[k, tau(k)]."""
    pos = [k for k in range(1, N + 1) if k != omit_pos]
    vals = [k for k in range(1, N + 1) if k != omit_val]
    terms = {}
    for perm in itertools.permutations(vals):
        coeff = qf ** inversions(perm)
        if columns:
            letters = tuple((perm[a], pos[a]) for a in range(len(pos)))
        else:
            letters = tuple((pos[a], perm[a]) for a in range(len(pos)))
        terms[Word(letters, 0)] = coeff
    return NCPoly(N, terms)


def s_matrix_forms(series: Series, form: str = "corrected") -> tuple[NCMatrix, NCMatrix]:
    """Both expressions of the cofactor matrix.

    For type A these are the column-indexed and row-indexed quantum minor
    sums; for B/C/D the two coincide (a single scaled generator).
    """
    N = series.N
    if series.tag == "A":
        mq = -Q
        colf, rowf = [], []
        for i in range(1, N + 1):
            crow, rrow = [], []
            for j in range(1, N + 1):
                pref = mq ** (i - j) if form == "corrected" else ONE
                crow.append(_minor_sum(N, i, j, True, mq) * pref)
                rrow.append(_minor_sum(N, j, i, False, mq) * pref)
            colf.append(crow)
            rowf.append(rrow)
        return NCMatrix(colf), NCMatrix(rowf)
    r = rho(series)
    rows = []
    for i in range(1, N + 1):
        row = []
        for j in range(1, N + 1):
            c = qpow(r[j - 1] - r[i - 1]) * (series.sign(i) * series.sign(j))
            if form == "corrected":
                a, b = series.conj(j), series.conj(i)
            elif form == "displayed":
                a, b = series.conj(i), series.conj(j)
            else:
                raise ValueError(f"unknown cofactor form {form!r}")
            row.append(gen(N, a, b) * c)
        rows.append(row)
    m = NCMatrix(rows)
    return m, m


def s_matrix(series: Series, form: str = "corrected") -> NCMatrix:
    """Cofactor matrix s with V s = Q I (B/C/D) or V s = D I (A) modulo FRT.

    ``form="displayed"`` reproduces the displayed index pattern
    s_ij ~ V[N+1-i, N+1-j] (B/C/D) or the unsigned minor sums (A);
    ``"corrected"`` uses V[N+1-j, N+1-i] and the (-q)^(i-j) sign factor.
    """
    return s_matrix_forms(series, form)[0]


@lru_cache(maxsize=None)
def q_epsilon(series: Series) -> dict:
    """The q-antisymmetric vector of V^{(x)N}: the common eigenvector of every
    Rh acting on adjacent tensor slots with eigenvalue -1/q, normalized to 1 at
    (1, 2, ..., N).  Returned as {index sequence: RatFunc}.

    Only sequences of total weight zero can occur (Rh preserves weight), so
    the search is restricted to those.
    """
    from .fastfield import from_frac, to_frac

    N = series.N
    Rh = rhat(build_R(series))
    lam = to_frac(-(Q.invert()))
    image: dict = {}
    for (r, c), v in Rh.entries.items():
        image.setdefault(c, []).append((r, to_frac(v)))
    if series.tag == "A":
        seqs = list(itertools.permutations(range(1, N + 1)))
    else:
        wt = {i: (i if i <= N // 2 else (i - N - 1 if i > (N + 1) // 2 else 0)) for i in range(1, N + 1)}
        from collections import Counter
        seqs = []
        for I in itertools.product(range(1, N + 1), repeat=N):
            cnt = Counter(wt[i] for i in I)
            if all(cnt[k] == cnt[-k] for k in cnt if k > 0):
                seqs.append(I)
    cols = {}
    for I in seqs:
        col: dict = {}
        for p in range(N - 1):
            for (k, l), v in image.get((I[p], I[p + 1]), ()):
                key = (p, I[:p] + (k, l) + I[p + 2:])
                col[key] = col[key] + v if key in col else v
            key = (p, I)
            col[key] = col[key] - lam if key in col else -lam
        cols[I] = {k: v for k, v in col.items() if v}
    base = tuple(range(1, N + 1))
    others = [I for I in seqs if I != base]
    sys_ = linalg.SparseSystem([cols[I] for I in others], [{k: -v for k, v in cols[base].items()}])
    x = sys_.solution()
    if x is None:
        raise ValueError(f"no q-antisymmetric vector of weight zero for {series.tag}{N}")
    if len(others) - sys_.rank() != 0:
        raise ValueError("q-antisymmetric vector is not unique")
    out = {base: ONE}
    for c, v in x.items():
        out[others[c]] = from_frac(v)
    return out


DET_READINGS = ("pairs", "literal", "inverted", "epsilon")


def quantum_determinant(series: Series, form: str = "columns", reading: str = "inverted") -> NCPoly:
    """Quantum determinant.

    ``form="columns"``: sum w(sigma) V[s(1),1] ... V[s(N),N];
    ``form="rows"``:    sum w(sigma) V[1,s(1)] ... V[N,s(N)].

    For the permutation readings w = (-q)^l(sigma) times 1 (type A),
    q^(-r) (type D) or q^(+r) (type C) with r from :func:`r_statistic`.
    ``reading="epsilon"`` uses the full q-antisymmetric vector instead,
    which for D with N >= 4 also weights some non-permutation sequences.
    """
    N = series.N
    if series.tag == "B":
        raise UnsupportedVariant("odd-case quantum determinant is not supported")
    if form not in ("columns", "rows"):
        raise ValueError(f"unknown determinant form {form!r}")
    if reading == "epsilon":
        weights = q_epsilon(series)
    else:
        mq = -Q
        weights = {}
        for perm in itertools.permutations(range(1, N + 1)):
            c = mq ** inversions(perm)
            if series.tag in "CD":
                rr = r_statistic(perm, series.n, reading)
                c = c * (qpow(-rr) if series.tag == "D" else qpow(rr))
            weights[perm] = c
    terms = {}
    for perm, c in weights.items():
        if form == "columns":
            letters = tuple((perm[k], k + 1) for k in range(N))
        else:
            letters = tuple((k + 1, perm[k]) for k in range(N))
        terms[Word(letters, 0)] = c
    return NCPoly(N, terms)


def select_det_reading(series: Series, candidates=DET_READINGS) -> tuple[str, dict]:
    """First reading whose determinant has counit 1 and whose row and column
    forms agree modulo the FRT relations.  Returns (reading, trace)."""
    from .idealcheck import membership

    _, frt = _frt_for_series(series)
    trace = {}
    for rd in candidates:
        try:
            D = quantum_determinant(series, "columns", rd)
        except ValueError as exc:
            trace[rd] = f"unavailable: {exc}"
            continue
        if counit(D) != ONE:
            trace[rd] = f"counit {counit(D)}"
            continue
        Dr = quantum_determinant(series, "rows", rd)
        if not membership(list(frt), D - Dr, series.N).in_span:
            trace[rd] = "row and column forms differ"
            continue
        trace[rd] = "selected"
        return rd, trace
    raise ValueError(f"no determinant reading passes for {series.tag}{series.N}: {trace}")


def q_element(series: Series, i: int = 1, side: str = "Vs", form: str = "corrected") -> NCPoly:
    """Q = sum_k V[i,k] s[k,i] (side="Vs") or sum_k s[i,k] V[k,i] (side="sV")."""
    if series.tag == "A":
        raise ValueError("Q is defined for series B, C, D only")
    N = series.N
    s = s_matrix(series, form)
    acc = NCPoly(N)
    for k in range(1, N + 1):
        if side == "Vs":
            acc = acc + gen(N, i, k) * s[k, i]
        else:
            acc = acc + s[i, k] * gen(N, k, i)
    return acc


def vs_products(series: Series, form: str = "corrected") -> tuple[NCMatrix, NCMatrix]:
    V = NCMatrix.generic(series.N)
    s_col, s_row = s_matrix_forms(series, form)
    return V @ s_col, s_row @ V


# presentations ----------------------------------------------------------------

@dataclass
class Presentation:
    series: Series
    variant: str
    frt: list
    extra: list
    s: NCMatrix
    det: NCPoly | None
    qelt: NCPoly | None
    antipode: dict
    antipode_t: NCPoly | None
    star: dict
    star_t: NCPoly | None
    s_form: str = "corrected"
    det_reading: str | None = None
    Rh: RTensor | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.series.N

    @property
    def has_t(self) -> bool:
        return self.variant in ("tilde", "special-tilde")

    @property
    def relations(self) -> list:
        return list(self.frt) + list(self.extra)

    @property
    def generator_count(self) -> int:
        return self.N * self.N + (1 if self.has_t else 0)

    @property
    def name(self) -> str:
        tag, N = self.series.tag, self.N
        base = {"A": "U" if self.has_t else "SU", "B": "O", "C": "USp", "D": "O"}[tag]
        if tag == "D" and self.variant in ("special", "special-tilde"):
            base = "SO"
        tilde = "~" if self.has_t and tag != "A" else ""
        return f"{base}{tilde}_q({N})"

    def to_json(self) -> dict:
        return {
            "series": self.series.tag,
            "N": self.N,
            "variant": self.variant,
            "name": self.name,
            "generator_count": self.generator_count,
            "s_form": self.s_form,
            "det_reading": self.det_reading,
            "relations": {
                "frt": [format_ncpoly(p) for p in self.frt],
                "extra": [format_ncpoly(p) for p in self.extra],
            },
            "hopf": {
                "s": [[format_ncpoly(x) for x in row] for row in self.s.entries],
                "det": None if self.det is None else format_ncpoly(self.det),
                "Q": None if self.qelt is None else format_ncpoly(self.qelt),
                "antipode": {f"{i},{j}": format_ncpoly(p) for (i, j), p in sorted(self.antipode.items())},
                "antipode_t": None if self.antipode_t is None else format_ncpoly(self.antipode_t),
                "star": {f"{i},{j}": format_ncpoly(p) for (i, j), p in sorted(self.star.items())},
                "star_t": None if self.star_t is None else format_ncpoly(self.star_t),
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, doc: dict) -> "Presentation":
        series = Series(doc["series"], doc["N"])
        N = series.N
        P = lambda s: None if s is None else parse_ncpoly(s, N)  # noqa: E731
        h = doc["hopf"]
        tab = lambda d: {tuple(int(x) for x in k.split(",")): parse_ncpoly(v, N) for k, v in d.items()}  # noqa: E731
        return cls(
            series=series,
            variant=doc["variant"],
            frt=[parse_ncpoly(s, N) for s in doc["relations"]["frt"]],
            extra=[parse_ncpoly(s, N) for s in doc["relations"]["extra"]],
            s=NCMatrix([[parse_ncpoly(x, N) for x in row] for row in h["s"]]),
            det=P(h["det"]),
            qelt=P(h["Q"]),
            antipode=tab(h["antipode"]),
            antipode_t=P(h["antipode_t"]),
            star=tab(h["star"]),
            star_t=P(h["star_t"]),
            s_form=doc.get("s_form", "corrected"),
            det_reading=doc.get("det_reading"),
        )


def resolve_det_reading(series: Series, det_reading: str = "auto") -> str | None:
    if series.tag == "A":
        return None
    if series.tag in "BC":
        return None if det_reading == "auto" else det_reading
    # epsilon is the full q-antisymmetrizer; it coincides with "inverted"
    # at N = 2 and is what select_det_reading picks at N = 4
    return "epsilon" if det_reading == "auto" else det_reading


def ideal_generators(series: Series, variant: str, s_form: str = "corrected",
                     det_reading: str = "auto") -> tuple[list, list]:
    """(FRT relations, extra generators) of the variant's ideal."""
    _check_variant(series, variant)
    N = series.N
    _, frt = _frt_for_series(series)
    extra = []
    tilde = variant in ("tilde", "special-tilde")
    if series.tag == "A":
        D = quantum_determinant(series)
        extra.append((D.mul_t(1) if tilde else D) - 1)
        return list(frt), extra
    VS, SV = vs_products(series, s_form)
    for mat in (VS, SV):
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                p = mat[i, j]
                if tilde:
                    p = p.mul_t(1)
                extra.append(p - (1 if i == j else 0))
    if variant in ("special", "special-tilde"):
        D = quantum_determinant(series, reading=resolve_det_reading(series, det_reading))
        extra.insert(0, (D.mul_t(series.n) if variant == "special-tilde" else D) - 1)
    return list(frt), extra


def antipode_images(series: Series, variant: str, s: NCMatrix, det: NCPoly | None,
                    qelt: NCPoly | None) -> tuple[dict, NCPoly | None]:
    N = series.N
    tilde = variant in ("tilde", "special-tilde")
    table = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            table[(i, j)] = s[i, j].mul_t(1) if tilde else s[i, j]
    if not tilde:
        return table, None
    return table, (det if series.tag == "A" else qelt)


def star_images(series: Series, variant: str, antipode: dict, t_image: NCPoly | None) -> tuple[dict, NCPoly | None]:
    """V[i,j]^* = S(V[j,i]); t^* = S(t)."""
    N = series.N
    table = {(i, j): antipode[(j, i)] for i in range(1, N + 1) for j in range(1, N + 1)}
    return table, t_image


def build_presentation(series: Series | str, N: int | None = None, variant: str = "plain",
                       s_form: str = "corrected", det_reading: str = "auto") -> Presentation:
    if not isinstance(series, Series):
        series = Series(series, N)
    _check_variant(series, variant)
    Rh, _ = _frt_for_series(series)
    reading = resolve_det_reading(series, det_reading)
    frt, extra = ideal_generators(series, variant, s_form, det_reading)
    s = s_matrix(series, s_form)
    det = None
    # the D-series epsilon solve grows quickly (minutes at N = 6), so plain
    # and tilde presentations above N = 4 skip the determinant
    if series.tag == "A" or (series.tag == "D" and (variant.startswith("special") or series.N <= 4)):
        det = quantum_determinant(series, reading=reading)
    qelt = None if series.tag == "A" else q_element(series, 1, "Vs", s_form)
    anti, anti_t = antipode_images(series, variant, s, det, qelt)
    star, star_t = star_images(series, variant, anti, anti_t)
    return Presentation(series, variant, frt, extra, s, det, qelt, anti, anti_t, star, star_t,
                        s_form=s_form, det_reading=reading, Rh=Rh)


# morphisms --------------------------------------------------------------------

def morphism_images(kind: str, series: Series | str, N: int | None = None,
                    corner: str = "Q") -> dict:
    """Generator image table of phi, rho or phitilde.

    ``N`` is the size of the *source*.  phi and phitilde go from size N to
    size N - 2 (dropping the first and last index); rho keeps the size and
    sends t to 1.  The table maps (i, j) -> NCPoly and "t" -> NCPoly (or is
    absent when the source has no t).

    With all corners sent to delta, phitilde takes (Vs)_11 to 1 rather than
    to Q, so t (Vs)_11 - 1 lands outside the target ideal.  ``corner="Q"``
    (default) sends V[1,1] to the target's Q instead; ``corner="delta"``
    keeps the bare delta table.
    """
    if not isinstance(series, Series):
        series = Series(series, N)
    Ns = series.N
    if kind in ("phi", "phitilde"):
        Nt = Ns - 2
        if Nt < 1:
            raise ValueError("source too small for phi")
        table: dict = {}
        for i in range(1, Ns + 1):
            for j in range(1, Ns + 1):
                if 2 <= i <= Ns - 1 and 2 <= j <= Ns - 1:
                    table[(i, j)] = gen(Nt, i - 1, j - 1)
                else:
                    table[(i, j)] = scalar(Nt, 1 if i == j else 0)
        if kind == "phitilde":
            table["t"] = tgen(Nt)
            if corner == "Q":
                table[(1, 1)] = q_element(Series(series.tag, Nt), 1, "Vs")
            elif corner != "delta":
                raise ValueError(f"unknown corner rule {corner!r}")
        return table
    if kind == "rho":
        table = {(i, j): gen(Ns, i, j) for i in range(1, Ns + 1) for j in range(1, Ns + 1)}
        table["t"] = scalar(Ns, 1)
        return table
    raise ValueError(f"unknown morphism {kind!r}")


def apply_table(table: dict, p: NCPoly) -> NCPoly:
    letters = {k: v for k, v in table.items() if k != "t"}
    target_N = next(iter(letters.values())).N
    return hom_apply(letters, table.get("t"), p, target_N=target_N)


def compose_tables(outer: dict, inner: dict) -> dict:
    """Table of outer o inner (apply inner first)."""
    out = {}
    for k, v in inner.items():
        out[k] = apply_table(outer, v)
    return out
