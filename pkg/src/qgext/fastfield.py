"""Elements of Q(u) backed by flint polynomials, for the elimination kernel.

RatFunc stays the public coefficient type.  Linear systems are converted to
:class:`Frac` on the way in and back on the way out; every certificate is
then replayed in RatFunc arithmetic, so the fast path is never trusted on
its own.
"""

from __future__ import annotations

from fractions import Fraction

from flint import fmpq, fmpq_poly

from .coeffring import HalfLaurent, RatFunc

__all__ = ["Frac", "to_frac", "from_frac"]

_ONE = fmpq_poly([1])


class Frac:
    __slots__ = ("n", "d")

    def __init__(self, n, d=_ONE, _reduced=False):
        if not _reduced:
            if d == 0:
                raise ZeroDivisionError("zero denominator")
            if n == 0:
                n, d = fmpq_poly([]), _ONE
            else:
                g = n.gcd(d)
                if g != 1:
                    n, d = n / g, d / g
                lc = d[d.degree()]
                if lc != 1:
                    n, d = n / lc, d / lc
        self.n = n
        self.d = d

    @staticmethod
    def _c(x):
        if isinstance(x, Frac):
            return x
        if isinstance(x, (int, Fraction)):
            return Frac(fmpq_poly([fmpq(x.numerator, x.denominator) if isinstance(x, Fraction) else x]), _ONE, True)
        if isinstance(x, RatFunc):
            return to_frac(x)
        return NotImplemented

    def __add__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return o
        if self.d == o.d:
            return Frac(self.n + o.n, self.d)
        return Frac(self.n * o.d + o.n * self.d, self.d * o.d)

    __radd__ = __add__

    def __neg__(self):
        return Frac(-self.n, self.d, True)

    def __sub__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return o
        if self.n == 0 or o.n == 0:
            return Frac(fmpq_poly([]), _ONE, True)
        if o.d == _ONE and self.d == _ONE:
            return Frac(self.n * o.n, _ONE, True)
        g1 = self.n.gcd(o.d)
        g2 = o.n.gcd(self.d)
        n = (self.n / g1) * (o.n / g2)
        d = (self.d / g2) * (o.d / g1)
        lc = d[d.degree()]
        if lc != 1:
            n, d = n / lc, d / lc
        return Frac(n, d, True)

    __rmul__ = __mul__

    def inv(self):
        if self.n == 0:
            raise ZeroDivisionError("inverse of zero")
        return Frac(self.d, self.n)

    def __truediv__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, o):
        return self._c(o) * self.inv()

    def __bool__(self):
        return self.n != 0

    def __eq__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return False
        return self.n == o.n and self.d == o.d

    def __hash__(self):
        return hash((str(self.n), str(self.d)))

    @property
    def size(self) -> int:
        return self.n.degree() + self.d.degree() + 2

    def __repr__(self):
        return f"Frac(({self.n})/({self.d}))"


def _laurent_to_poly(h: HalfLaurent):
    lo = min(h.terms) if h.terms else 0
    coeffs = [0] * ((max(h.terms) - lo + 1) if h.terms else 0)
    for e, c in h.terms.items():
        coeffs[e - lo] = fmpq(c.numerator, c.denominator)
    return fmpq_poly(coeffs), lo


_cache: dict = {}


def to_frac(r) -> Frac:
    if not isinstance(r, RatFunc):
        return Frac._c(r)
    hit = _cache.get(r)
    if hit is not None:
        return hit
    n, ln = _laurent_to_poly(r.num)
    d, ld = _laurent_to_poly(r.den)
    shift = ln - ld
    if shift > 0:
        n = n * fmpq_poly([0] * shift + [1])
    elif shift < 0:
        d = d * fmpq_poly([0] * (-shift) + [1])
    out = Frac(n, d)
    if len(_cache) < 100_000:
        _cache[r] = out
    return out


def _poly_to_laurent(p) -> HalfLaurent:
    terms = {}
    for e in range(p.degree() + 1):
        c = p[e]
        if c != 0:
            terms[e] = Fraction(int(c.p), int(c.q))
    return HalfLaurent(terms)


def from_frac(f: Frac) -> RatFunc:
    if isinstance(f, int):
        return RatFunc._coerce(f)
    return RatFunc(_poly_to_laurent(f.n), _poly_to_laurent(f.d))
