"""Exact coefficients: Laurent polynomials in u = q**(1/2) over Q and their fractions.

Every scalar that appears in the R-matrices and relations is of the form
num(u)/den(u) with num, den Laurent polynomials with rational coefficients.
Exponents are stored in units of u, so the exponent ``e`` stands for
``q**(e/2)``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "HalfLaurent",
    "RatFunc",
    "PoleError",
    "parse_ratfunc",
    "ZERO",
    "ONE",
    "Q",
    "U",
    "qpow",
    "qpow_half",
]


class PoleError(ZeroDivisionError):
    """Raised on division by zero or evaluation at a pole."""


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"cannot coerce {c!r} to an exact rational")


class HalfLaurent:
    """Finite sum of c * u**e, c rational, e integer. Immutable."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms=None):
        t = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for e, c in items:
                c = _frac(c)
                if c:
                    e = int(e)
                    v = t.get(e, 0) + c
                    if v:
                        t[e] = v
                    else:
                        t.pop(e, None)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t: dict) -> "HalfLaurent":
        obj = cls.__new__(cls)
        obj._t = t
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "HalfLaurent":
        c = _frac(c)
        return cls._raw({0: c} if c else {})

    @classmethod
    def mono(cls, e: int, c=1) -> "HalfLaurent":
        c = _frac(c)
        return cls._raw({int(e): c} if c else {})

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return sorted(self._t.items())

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def min_exp(self) -> int:
        return min(self._t)

    def max_exp(self) -> int:
        return max(self._t)

    def degree_span(self) -> int:
        return max(self._t) - min(self._t) if self._t else -1

    def lead(self) -> Fraction:
        return self._t[max(self._t)]

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, HalfLaurent):
            other = HalfLaurent.const(other)
        if not other._t:
            return self
        t = dict(self._t)
        for e, c in other._t.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                del t[e]
        return HalfLaurent._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return HalfLaurent._raw({e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        if not isinstance(other, HalfLaurent):
            other = HalfLaurent.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HalfLaurent):
            c = _frac(other)
            if not c:
                return HalfLaurent._raw({})
            return HalfLaurent._raw({e: v * c for e, v in self._t.items()})
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        t: dict = {}
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = e1 + e2
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    t.pop(e, None)
        return HalfLaurent._raw(t)

    __rmul__ = __mul__

    def shift(self, k: int) -> "HalfLaurent":
        """Multiply by u**k."""
        return HalfLaurent._raw({e + k: c for e, c in self._t.items()})

    def scale(self, c) -> "HalfLaurent":
        return self * _frac(c)

    def __pow__(self, n: int):
        if n < 0:
            if len(self._t) != 1:
                raise ValueError("negative power of a non-monomial HalfLaurent")
            (e, c), = self._t.items()
            return HalfLaurent._raw({e * n: c ** n})
        r = HalfLaurent.const(1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, HalfLaurent):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # polynomial helpers (exponents assumed >= 0) --------------------------
    def normalized(self) -> tuple[int, "HalfLaurent"]:
        """Return (s, p) with self = u**s * p and min exponent of p equal to 0."""
        if not self._t:
            return 0, self
        s = min(self._t)
        return s, self.shift(-s)

    def _divmod_poly(self, other: "HalfLaurent"):
        # exponent-0-based polynomial division
        r = dict(self._t)
        dq = other.max_exp()
        lc = other._t[dq]
        quo: dict = {}
        while r:
            er = max(r)
            if er < dq:
                break
            c = r[er] / lc
            k = er - dq
            quo[k] = c
            for e, v in other._t.items():
                x = r.get(e + k, 0) - c * v
                if x:
                    r[e + k] = x
                else:
                    r.pop(e + k, None)
        return HalfLaurent._raw(quo), HalfLaurent._raw(r)

    def evaluate(self, u0):
        if isinstance(u0, Fraction) or isinstance(u0, int):
            u0 = Fraction(u0)
            return sum((c * u0 ** e for e, c in self._t.items()), Fraction(0))
        return sum(float(c) * u0 ** e for e, c in self._t.items()) if not isinstance(u0, complex) \
            else sum(complex(float(c)) * u0 ** e for e, c in self._t.items())

    def __repr__(self):
        return f"HalfLaurent({_render_terms(self)})"

    def __str__(self):
        return _render_terms(self)


def _poly_gcd(a: HalfLaurent, b: HalfLaurent) -> HalfLaurent:
    """Monic gcd of two polynomials (min exponent 0)."""
    while b._t:
        _, r = a._divmod_poly(b)
        a, b = b, r
    if not a._t:
        return a
    return a * (1 / a.lead())


def _content(p: HalfLaurent) -> Fraction:
    nums = [c.numerator for c in p._t.values()]
    dens = [c.denominator for c in p._t.values()]
    g = 0
    for n in nums:
        g = math.gcd(g, n)
    lcm = 1
    for d in dens:
        lcm = lcm * d // math.gcd(lcm, d)
    return Fraction(g, lcm)


class RatFunc:
    """Element num/den of Q(u), kept in canonical reduced form.

    Canonical form: gcd(num, den) = 1 as polynomials in u, den has minimal
    u-exponent 0, integer coefficients with gcd 1 and positive leading
    coefficient.  Equality is therefore syntactic.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _canonical=False):
        if not isinstance(num, HalfLaurent):
            num = HalfLaurent.const(num)
        if den is None:
            den = HalfLaurent.const(1)
        elif not isinstance(den, HalfLaurent):
            den = HalfLaurent.const(den)
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def from_laurent(cls, p: HalfLaurent) -> "RatFunc":
        return cls(p, HalfLaurent.const(1), _canonical=True)

    @classmethod
    def q(cls) -> "RatFunc":
        return cls.from_laurent(HalfLaurent.mono(2))

    @classmethod
    def u(cls) -> "RatFunc":
        return cls.from_laurent(HalfLaurent.mono(1))

    def is_zero(self) -> bool:
        return not self.num._t

    def __bool__(self):
        return bool(self.num._t)

    def is_laurent(self) -> bool:
        return len(self.den._t) == 1

    def as_laurent(self) -> HalfLaurent:
        """The value as a HalfLaurent; raises ValueError if den is not a unit."""
        if len(self.den._t) != 1:
            raise ValueError("not a Laurent polynomial")
        (e, c), = self.den._t.items()
        return self.num.shift(-e) * (1 / c)

    def canonicalize(self) -> "RatFunc":
        return RatFunc(self.num, self.den)

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, HalfLaurent):
            return RatFunc.from_laurent(x)
        return RatFunc(HalfLaurent.const(x), _canonical=True)

    @staticmethod
    def _foreign(x) -> bool:
        # let NCPoly, numpy scalars etc. handle the reflected operation
        return not isinstance(x, (RatFunc, HalfLaurent, Rational))

    def __add__(self, other):
        if RatFunc._foreign(other):
            return NotImplemented
        o = RatFunc._coerce(other)
        if not o.num._t:
            return self
        if not self.num._t:
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        if RatFunc._foreign(other):
            return NotImplemented
        return self + (-RatFunc._coerce(other))

    def __rsub__(self, other):
        if RatFunc._foreign(other):
            return NotImplemented
        return RatFunc._coerce(other) - self

    def __mul__(self, other):
        if RatFunc._foreign(other):
            return NotImplemented
        o = RatFunc._coerce(other)
        if not o.num._t or not self.num._t:
            return ZERO
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def invert(self) -> "RatFunc":
        if not self.num._t:
            raise PoleError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        if RatFunc._foreign(other):
            return NotImplemented
        return self * RatFunc._coerce(other).invert()

    def __rtruediv__(self, other):
        if RatFunc._foreign(other):
            return NotImplemented
        return RatFunc._coerce(other) * self.invert()

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, HalfLaurent)):
            other = RatFunc._coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def conjugate(self) -> "RatFunc":
        # q is a positive real and all rationals are real
        return self

    # evaluation -----------------------------------------------------------
    def evaluate(self, q0):
        """Substitute q = q0 (so u = sqrt(q0)).

        Exact (a Fraction) when q0 is rational and either only even
        u-exponents occur or q0 is the square of a rational; otherwise the
        result is a float computed with u = math.sqrt(q0).
        """
        exps = list(self.num._t) + list(self.den._t)
        if isinstance(q0, (int, Fraction)):
            q0 = Fraction(q0)
            if q0 <= 0:
                raise ValueError("q must be positive")
            if all(e % 2 == 0 for e in exps):
                num = sum((c * q0 ** (e // 2) for e, c in self.num._t.items()), Fraction(0))
                den = sum((c * q0 ** (e // 2) for e, c in self.den._t.items()), Fraction(0))
                if den == 0:
                    raise PoleError(f"pole at q = {q0}")
                return num / den
            rn, rd = math.isqrt(q0.numerator), math.isqrt(q0.denominator)
            if rn * rn == q0.numerator and rd * rd == q0.denominator:
                u0 = Fraction(rn, rd)
                den = self.den.evaluate(u0)
                if den == 0:
                    raise PoleError(f"pole at q = {q0}")
                return self.num.evaluate(u0) / den
            q0 = float(q0)
        if isinstance(q0, complex) or q0 <= 0:
            raise ValueError("q must be a positive real number")
        u0 = math.sqrt(q0)
        den = self.den.evaluate(u0)
        if den == 0:
            raise PoleError(f"pole at q = {q0}")
        return self.num.evaluate(u0) / den

    def evaluate_u(self, u0):
        den = self.den.evaluate(u0)
        if den == 0:
            raise PoleError(f"pole at u = {u0}")
        return self.num.evaluate(u0) / den

    def __float__(self):
        raise TypeError("RatFunc has no float value; use evaluate(q0)")

    def __str__(self):
        if len(self.den._t) == 1 and self.den._t.get(0) == 1:
            return _render_terms(self.num)
        return f"({_render_terms(self.num)})/({_render_terms(self.den)})"

    def __repr__(self):
        return f"RatFunc({self})"


def _canonicalize(num: HalfLaurent, den: HalfLaurent) -> tuple[HalfLaurent, HalfLaurent]:
    if not den._t:
        raise PoleError("zero denominator")
    if not num._t:
        return num, HalfLaurent.const(1)
    sd, d = den.normalized()
    sn, n = num.normalized()
    shift = sn - sd
    if len(d._t) > 1 and len(n._t) > 1:
        g = _poly_gcd(n, d)
        if g.max_exp() > 0:
            n, r1 = n._divmod_poly(g)
            d, r2 = d._divmod_poly(g)
            assert not r1._t and not r2._t
    elif len(d._t) > 1:
        pass
    # make den primitive with positive leading coefficient
    c = _content(d)
    if d.lead() < 0:
        c = -c
    if c != 1:
        inv = 1 / c
        d = d * inv
        n = n * inv
    return n.shift(shift), d


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_qexp(e: int) -> str:
    if e % 2 == 0:
        k = e // 2
        return f"q^{k}" if k >= 0 else f"q^({k})"
    return f"q^({e}/2)"


def _render_terms(p: HalfLaurent) -> str:
    if not p._t:
        return "0"
    parts = []
    for e, c in sorted(p._t.items(), reverse=True):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = _fmt_coeff(a)
        elif a == 1:
            body = _fmt_qexp(e)
        else:
            body = f"{_fmt_coeff(a)}*{_fmt_qexp(e)}"
        parts.append((sign, body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# parsing ----------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(q\^\(\s*-?\d+(?:/\d+)?\s*\)|q\^-?\d+|q\b|u\^\(\s*-?\d+\s*\)|u\^-?\d+|u\b)|(.))")


def _qexp_to_u(tok: str) -> int:
    var, _, rest = tok.partition("^")
    rest = rest.strip("() ")
    if not rest:
        val = Fraction(1)
    else:
        val = Fraction(rest.replace(" ", ""))
    e = val * 2 if var == "q" else val
    if e.denominator != 1:
        raise ValueError(f"exponent in {tok!r} is not a multiple of 1/2")
    return int(e)


class _Parser:
    def __init__(self, text: str):
        self.toks = []
        for m in _TOKEN.finditer(text):
            num, var, other = m.groups()
            if num is not None:
                self.toks.append(("num", Fraction(num)))
            elif var is not None:
                self.toks.append(("var", _qexp_to_u(var)))
            elif other is not None and other.strip():
                self.toks.append(("op", other))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, op):
        k, v = self.take()
        if k != "op" or v != op:
            raise ValueError(f"expected {op!r}, got {v!r}")

    def expr(self) -> RatFunc:
        k, v = self.peek()
        sign = 1
        if k == "op" and v in "+-":
            self.take()
            sign = -1 if v == "-" else 1
        acc = self.term() * sign
        while True:
            k, v = self.peek()
            if k == "op" and v in "+-":
                self.take()
                t = self.term()
                acc = acc + t if v == "+" else acc - t
            else:
                return acc

    def term(self) -> RatFunc:
        acc = self.factor()
        while True:
            k, v = self.peek()
            if k == "op" and v in "*/":
                self.take()
                f = self.factor()
                acc = acc * f if v == "*" else acc / f
            else:
                return acc

    def factor(self) -> RatFunc:
        k, v = self.take()
        if k == "num":
            return RatFunc._coerce(v)
        if k == "var":
            return RatFunc.from_laurent(HalfLaurent.mono(v))
        if k == "op" and v == "(":
            r = self.expr()
            self.expect(")")
            return r
        if k == "op" and v == "-":
            return -self.factor()
        raise ValueError(f"unexpected token {v!r}")


def parse_ratfunc(text: str) -> RatFunc:
    """Inverse of ``str(RatFunc)``; also accepts u-powers and nested parentheses."""
    p = _Parser(text)
    r = p.expr()
    if p.i != len(p.toks):
        raise ValueError(f"trailing input in {text!r}")
    return r


ZERO = RatFunc(HalfLaurent(), _canonical=True)
ONE = RatFunc(HalfLaurent.const(1), _canonical=True)
Q = RatFunc.q()
U = RatFunc.u()


def qpow(k) -> RatFunc:
    """q**k for integer or half-integer k."""
    e = Fraction(k) * 2
    if e.denominator != 1:
        raise ValueError("q-exponent must be a multiple of 1/2")
    return RatFunc.from_laurent(HalfLaurent.mono(int(e)))


def qpow_half(e: int) -> RatFunc:
    """u**e, i.e. q**(e/2)."""
    return RatFunc.from_laurent(HalfLaurent.mono(e))
