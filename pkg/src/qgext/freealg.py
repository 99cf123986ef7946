"""Free noncommutative algebra on matrix-entry generators V[i,j] plus a central t.

Monomials are :class:`Word` values: a tuple of (i, j) letters together with
the exponent of the adjoined central generator ``t``.  Because ``t`` is
central it never occupies a position inside the word.

Polynomials carry their alphabet size ``N`` (generators V[i,j] with
1 <= i, j <= N) so that products of polynomials over different alphabets
are rejected.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import NamedTuple

from .coeffring import ONE, ZERO, HalfLaurent, RatFunc

__all__ = [
    "Word",
    "NCPoly",
    "TensorPoly",
    "NCMatrix",
    "AlphabetMismatch",
    "MissingImage",
    "gen",
    "tgen",
    "scalar",
    "word_key",
    "coproduct",
    "counit",
    "anti_hom_apply",
    "hom_apply",
    "star_apply",
    "tensor_flatten3",
    "parse_ncpoly",
]


class AlphabetMismatch(ValueError):
    pass


class MissingImage(KeyError):
    pass


class Word(NamedTuple):
    letters: tuple = ()
    tpow: int = 0

    def __mul__(self, other: "Word") -> "Word":  # type: ignore[override]
        return Word(self.letters + other.letters, self.tpow + other.tpow)

    @property
    def degree(self) -> int:
        return len(self.letters) + self.tpow

    def __str__(self):
        parts = [f"V[{i},{j}]" for i, j in self.letters]
        s = " ".join(parts)
        if self.tpow:
            tp = "t" if self.tpow == 1 else f"t^{self.tpow}"
            s = f"{s} * {tp}" if s else tp
        return s or "1"


EMPTY = Word((), 0)


def word_key(w: Word):
    """Length-lexicographic order on letters, then t-exponent."""
    return (len(w.letters) + w.tpow, len(w.letters), w.letters, w.tpow)


def _coerce_coeff(c) -> RatFunc:
    return c if isinstance(c, RatFunc) else RatFunc._coerce(c)


class NCPoly:
    """Element of the free algebra: finite map Word -> RatFunc with no zeros."""

    __slots__ = ("N", "terms")

    def __init__(self, N: int, terms=None):
        self.N = N
        t: dict = {}
        if terms:
            for w, c in (terms.items() if isinstance(terms, dict) else terms):
                c = _coerce_coeff(c)
                if c:
                    v = t.get(w)
                    v = c if v is None else v + c
                    if v:
                        t[w] = v
                    else:
                        t.pop(w, None)
        self.terms = t

    @classmethod
    def _raw(cls, N, t):
        obj = cls.__new__(cls)
        obj.N = N
        obj.terms = t
        return obj

    def _check(self, other: "NCPoly"):
        if self.N != other.N:
            raise AlphabetMismatch(f"alphabet sizes differ: {self.N} vs {other.N}")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def words(self):
        return sorted(self.terms, key=word_key)

    def items(self):
        return [(w, self.terms[w]) for w in self.words()]

    def degree(self) -> int:
        return max((w.degree for w in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((w.degree for w in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({w.degree for w in self.terms}) <= 1

    def coeff(self, w: Word) -> RatFunc:
        return self.terms.get(w, ZERO)

    def constant(self) -> RatFunc:
        return self.terms.get(EMPTY, ZERO)

    def __add__(self, other):
        if not isinstance(other, NCPoly):
            other = scalar(self.N, other)
        self._check(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            v = t.get(w)
            v = c if v is None else v + c
            if v:
                t[w] = v
            else:
                t.pop(w, None)
        return NCPoly._raw(self.N, t)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._raw(self.N, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, NCPoly):
            other = scalar(self.N, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            c = _coerce_coeff(other)
            if not c:
                return NCPoly._raw(self.N, {})
            return NCPoly._raw(self.N, {w: v * c for w, v in self.terms.items()})
        self._check(other)
        t: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = Word(w1.letters + w2.letters, w1.tpow + w2.tpow)
                c = c1 * c2
                v = t.get(w)
                v = c if v is None else v + c
                if v:
                    t[w] = v
                else:
                    t.pop(w, None)
        return NCPoly._raw(self.N, t)

    def __rmul__(self, other):
        # scalar * poly; scalars are central
        return self * other

    def __pow__(self, n: int):
        r = scalar(self.N, 1)
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.N == other.N and self.terms == other.terms
        if isinstance(other, (int, Fraction, RatFunc)):
            return self == scalar(self.N, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.N, frozenset(self.terms.items())))

    def map_coeffs(self, f) -> "NCPoly":
        return NCPoly(self.N, {w: f(c) for w, c in self.terms.items()})

    def mul_t(self, k: int = 1) -> "NCPoly":
        return NCPoly._raw(self.N, {Word(w.letters, w.tpow + k): c for w, c in self.terms.items()})

    def __str__(self):
        return format_ncpoly(self)

    def __repr__(self):
        return f"NCPoly(N={self.N}, {format_ncpoly(self)})"


def gen(N: int, i: int, j: int) -> NCPoly:
    if not (1 <= i <= N and 1 <= j <= N):
        raise IndexError(f"V[{i},{j}] outside alphabet of size {N}")
    return NCPoly._raw(N, {Word(((i, j),), 0): ONE})


def tgen(N: int, k: int = 1) -> NCPoly:
    return NCPoly._raw(N, {Word((), k): ONE})


def scalar(N: int, c) -> NCPoly:
    c = _coerce_coeff(c)
    return NCPoly._raw(N, {EMPTY: c} if c else {})


class TensorPoly:
    """Element of A (x) A: finite map (Word, Word) -> RatFunc."""

    __slots__ = ("N", "terms")

    def __init__(self, N: int, terms=None):
        self.N = N
        t: dict = {}
        if terms:
            for k, c in (terms.items() if isinstance(terms, dict) else terms):
                c = _coerce_coeff(c)
                if c:
                    v = t.get(k)
                    v = c if v is None else v + c
                    if v:
                        t[k] = v
                    else:
                        t.pop(k, None)
        self.terms = t

    @classmethod
    def _raw(cls, N, t):
        obj = cls.__new__(cls)
        obj.N = N
        obj.terms = t
        return obj

    @classmethod
    def pure(cls, a: NCPoly, b: NCPoly) -> "TensorPoly":
        """a (x) b."""
        if a.N != b.N:
            raise AlphabetMismatch("alphabet sizes differ")
        t = {}
        for w1, c1 in a.terms.items():
            for w2, c2 in b.terms.items():
                t[(w1, w2)] = c1 * c2
        return cls(a.N, t)

    def __add__(self, other: "TensorPoly"):
        t = dict(self.terms)
        for k, c in other.terms.items():
            v = t.get(k)
            v = c if v is None else v + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return TensorPoly._raw(self.N, t)

    def __neg__(self):
        return TensorPoly._raw(self.N, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TensorPoly):
            c = _coerce_coeff(other)
            return TensorPoly(self.N, {k: v * c for k, v in self.terms.items()})
        t: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 * a2, b1 * b2)
                c = c1 * c2
                v = t.get(k)
                v = c if v is None else v + c
                if v:
                    t[k] = v
                else:
                    t.pop(k, None)
        return TensorPoly._raw(self.N, t)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TensorPoly):
            return NotImplemented
        return self.N == other.N and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def bidegrees(self) -> set:
        return {(a.degree, b.degree) for a, b in self.terms}

    def apply_left(self, f) -> NCPoly:
        """(f (x) id) where f: NCPoly -> RatFunc, yielding an NCPoly."""
        out = NCPoly(self.N)
        for (a, b), c in self.terms.items():
            s = f(NCPoly._raw(self.N, {a: ONE}))
            if s:
                out = out + NCPoly._raw(self.N, {b: c * s})
        return out

    def apply_right(self, f) -> NCPoly:
        out = NCPoly(self.N)
        for (a, b), c in self.terms.items():
            s = f(NCPoly._raw(self.N, {b: ONE}))
            if s:
                out = out + NCPoly._raw(self.N, {a: c * s})
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self.terms.items(), key=lambda kv: (word_key(kv[0][0]), word_key(kv[0][1]))):
            parts.append(f"({c}) * [{a}] (x) [{b}]")
        return " + ".join(parts)


class NCMatrix:
    """rows x cols matrix of NCPoly entries over a common alphabet."""

    def __init__(self, entries: list):
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")

    @classmethod
    def generic(cls, N: int) -> "NCMatrix":
        return cls([[gen(N, i, j) for j in range(1, N + 1)] for i in range(1, N + 1)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i - 1][j - 1]

    def __matmul__(self, other: "NCMatrix") -> "NCMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        N = self.entries[0][0].N
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = NCPoly(N)
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return NCMatrix(out)

    def __eq__(self, other):
        return isinstance(other, NCMatrix) and self.entries == other.entries


# Hopf machinery on the free algebra ------------------------------------------

def _delta_word(w: Word, N: int) -> dict:
    # each letter (i,j) -> sum_k (i,k) (x) (k,j); expand the product
    L = len(w.letters)
    out = {}
    for ks in itertools.product(range(1, N + 1), repeat=L):
        left = tuple((i, k) for (i, _), k in zip(w.letters, ks))
        right = tuple((k, j) for (_, j), k in zip(w.letters, ks))
        out[(Word(left, w.tpow), Word(right, w.tpow))] = ONE
    return out


def coproduct(p: NCPoly, N: int | None = None) -> TensorPoly:
    """Algebra-homomorphic extension of V[i,j] -> sum_k V[i,k] (x) V[k,j], t -> t (x) t."""
    N = p.N if N is None else N
    if N != p.N:
        raise AlphabetMismatch("alphabet sizes differ")
    t: dict = {}
    for w, c in p.terms.items():
        for k in _delta_word(w, N):
            v = t.get(k)
            v = c if v is None else v + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
    return TensorPoly._raw(N, t)


def counit(p: NCPoly) -> RatFunc:
    """V[i,j] -> delta_ij, t -> 1."""
    acc = ZERO
    for w, c in p.terms.items():
        if all(i == j for i, j in w.letters):
            acc = acc + c
    return acc


def hom_apply(images: dict, t_image: NCPoly | None, p: NCPoly, target_N: int | None = None) -> NCPoly:
    """Multiplicative extension of a generator table; letters map in order."""
    N = target_N if target_N is not None else _image_alphabet(images, t_image, p.N)
    out = NCPoly(N)
    for w, c in p.terms.items():
        acc = scalar(N, c)
        for letter in w.letters:
            try:
                acc = acc * images[letter]
            except KeyError:
                raise MissingImage(letter) from None
        if w.tpow:
            if t_image is None:
                raise MissingImage("t")
            for _ in range(w.tpow):
                acc = acc * t_image
        out = out + acc
    return out


def anti_hom_apply(images, t_image: NCPoly | None, p: NCPoly) -> NCPoly:
    """Linear, anti-multiplicative extension of a generator table.

    A word t^m l1 l2 ... lk goes to S(lk) ... S(l1) S(t)^m.  ``images`` is
    either a dict keyed by (i, j) or an :class:`NCMatrix`.
    """
    if isinstance(images, NCMatrix):
        images = {(i + 1, j + 1): images.entries[i][j]
                  for i in range(images.rows) for j in range(images.cols)}
    N = _image_alphabet(images, t_image, p.N)
    out = NCPoly(N)
    for w, c in p.terms.items():
        acc = scalar(N, c)
        for letter in reversed(w.letters):
            try:
                acc = acc * images[letter]
            except KeyError:
                raise MissingImage(letter) from None
        if w.tpow:
            if t_image is None:
                raise MissingImage("t")
            for _ in range(w.tpow):
                acc = acc * t_image
        out = out + acc
    return out


def star_apply(images, t_image: NCPoly | None, p: NCPoly) -> NCPoly:
    """Anti-linear anti-multiplicative extension of a star rule.

    Coefficients are real (q > 0, rational scalars), so conjugation is the
    identity and this coincides with :func:`anti_hom_apply`.
    """
    return anti_hom_apply(images, t_image, p.map_coeffs(RatFunc.conjugate))


def _image_alphabet(images, t_image, default):
    for v in images.values():
        return v.N
    if t_image is not None:
        return t_image.N
    return default


def tensor_flatten3(N: int, terms: dict) -> dict:
    """Normalize a map ((a,b),c) or (a,(b,c)) -> coeff into (a,b,c) -> coeff."""
    out: dict = {}
    for k, c in terms.items():
        if isinstance(k[0], tuple) and len(k[0]) == 2 and isinstance(k[0][0], Word):
            key = (k[0][0], k[0][1], k[1])
        else:
            key = (k[0], k[1][0], k[1][1])
        v = out.get(key)
        v = c if v is None else v + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return out


# text format -----------------------------------------------------------------

def _coeff_text(c: RatFunc) -> str:
    s = str(c)
    if c.is_laurent() and len(c.num.terms) == 1:
        return s
    return f"({s})"


def format_ncpoly(p: NCPoly) -> str:
    if not p.terms:
        return "0"
    out = []
    for w, c in p.items():
        neg = False
        if c.is_laurent() and len(c.num.terms) == 1 and next(iter(c.num.terms.values())) < 0:
            neg, c = True, -c
        if w == EMPTY:
            body = _coeff_text(c)
        elif c == ONE:
            body = str(w)
        else:
            body = f"{_coeff_text(c)} * {w}"
        out.append(("-" if neg else "+", body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


_NC_TOKEN = re.compile(
    r"\s*(?:(\d+(?:/\d+)?)"
    r"|(V\[\s*\d+\s*,\s*\d+\s*\])"
    r"|(t(?:\^\d+)?)(?![A-Za-z])"
    r"|(q\^\(\s*-?\d+(?:/\d+)?\s*\)|q\^-?\d+|q(?![A-Za-z])|u\^\(\s*-?\d+\s*\)|u\^-?\d+|u(?![A-Za-z]))"
    r"|(.))"
)


class _NCParser:
    def __init__(self, text: str, N: int):
        from .coeffring import _qexp_to_u
        self.N = N
        self.toks = []
        for m in _NC_TOKEN.finditer(text):
            num, v, t, qv, other = m.groups()
            if num is not None:
                self.toks.append(("num", Fraction(num)))
            elif v is not None:
                i, j = (int(x) for x in v[2:-1].split(","))
                self.toks.append(("V", (i, j)))
            elif t is not None:
                self.toks.append(("t", int(t[2:]) if "^" in t else 1))
            elif qv is not None:
                self.toks.append(("q", _qexp_to_u(qv)))
            elif other is not None and other.strip():
                self.toks.append(("op", other))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expr(self) -> NCPoly:
        k, v = self.peek()
        neg = False
        if k == "op" and v in "+-":
            self.take()
            neg = v == "-"
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            k, v = self.peek()
            if k == "op" and v in "+-":
                self.take()
                t = self.term()
                acc = acc + t if v == "+" else acc - t
            else:
                return acc

    def term(self) -> NCPoly:
        acc = self.factor()
        while True:
            k, v = self.peek()
            if k == "op" and v == "*":
                self.take()
                acc = acc * self.factor()
            elif k == "op" and v == "/":
                self.take()
                f = self.factor()
                if f.degree() > 0 or not f:
                    raise ValueError("division by a non-scalar")
                acc = acc * f.constant().invert()
            elif k in ("num", "V", "t", "q") or (k == "op" and v == "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> NCPoly:
        k, v = self.take()
        if k == "num":
            return scalar(self.N, v)
        if k == "V":
            return gen(self.N, *v)
        if k == "t":
            return tgen(self.N, v)
        if k == "q":
            return scalar(self.N, RatFunc.from_laurent(HalfLaurent.mono(v)))
        if k == "op" and v == "(":
            r = self.expr()
            k2, v2 = self.take()
            if v2 != ")":
                raise ValueError("unbalanced parenthesis")
            return r
        if k == "op" and v == "-":
            return -self.factor()
        raise ValueError(f"unexpected token {v!r}")


def parse_ncpoly(text: str, N: int) -> NCPoly:
    """Parse the text produced by ``str(NCPoly)`` (and generally any
    expression in numbers, q-powers, V[i,j], t and t^m)."""
    p = _NCParser(text, N)
    r = p.expr()
    if p.i != len(p.toks):
        raise ValueError(f"trailing input in {text!r}")
    return r
