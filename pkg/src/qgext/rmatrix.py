"""R-matrices of types A, B, C, D, the rank-one tensor K, and their identities.

Conventions: an :class:`RTensor` ``T`` stores ``T[(k, l), (i, j)]``, the
coefficient of e_k (x) e_l in the image of e_i (x) e_j.  Row pairs come
first, column pairs second.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeffring import ONE, ZERO, Q, RatFunc, parse_ratfunc, qpow
from . import linalg

__all__ = [
    "Series",
    "RTensor",
    "rho",
    "build_R",
    "rhat",
    "braid_check",
    "ktensor_explicit",
    "ktensor_from_rhat",
    "k_polynomial_fit",
    "KFit",
    "displayed_k_prefactor",
    "flip",
    "identity",
]


@dataclass(frozen=True)
class Series:
    """Lie type and matrix size.  C and D need even N, B odd N."""

    tag: str
    N: int

    def __post_init__(self):
        tag = self.tag.upper()
        object.__setattr__(self, "tag", tag)
        if tag not in "ABCD" or len(tag) != 1:
            raise ValueError(f"unknown series {self.tag!r}")
        if tag == "A" and self.N < 2:
            raise ValueError("series A needs N >= 2")
        if tag in "CD" and (self.N < 2 or self.N % 2):
            raise ValueError(f"series {tag} needs even N >= 2")
        if tag == "B" and (self.N < 3 or self.N % 2 == 0):
            raise ValueError("series B needs odd N >= 3")

    @property
    def n(self) -> int:
        if self.tag == "A":
            return self.N
        return self.N // 2

    def conj(self, i: int) -> int:
        """i' = N + 1 - i."""
        return self.N + 1 - i

    def sign(self, i: int) -> int:
        """(-1)**floor((i-1)/n) for type C, 1 otherwise."""
        if self.tag == "C":
            return -1 if (i - 1) // self.n else 1
        return 1

    def __str__(self):
        return f"{self.tag}{self.N}"


def rho(series: Series) -> list[Fraction]:
    """The half-integer vector rho_1..rho_N of types B, C, D."""
    n, N, tag = series.n, series.N, series.tag
    if tag == "C":
        return [Fraction(n + 1 - j) if j <= n else Fraction(n - j) for j in range(1, N + 1)]
    if tag == "D":
        return [Fraction(n - j) if j <= n else Fraction(n + 1 - j) for j in range(1, N + 1)]
    if tag == "B":
        out = []
        for j in range(1, N + 1):
            if j <= n:
                out.append(Fraction(2 * n + 1, 2) - j)
            elif j == n + 1:
                out.append(Fraction(0))
            else:
                # antisymmetric partner of the first block: rho_{N+1-j} = -rho_j
                out.append(Fraction(2 * n + 3, 2) - j)
        return out
    raise ValueError("rho is defined for series B, C, D only")


class RTensor:
    """Sparse N^2 x N^2 matrix over the coefficient field."""

    __slots__ = ("N", "entries")

    def __init__(self, N: int, entries=None):
        self.N = N
        e = {}
        for k, v in (entries or {}).items():
            if not isinstance(v, RatFunc):
                v = RatFunc._coerce(v)
            if v:
                e[k] = v
        self.entries = e

    def __getitem__(self, key) -> RatFunc:
        return self.entries.get(key, ZERO)

    def nnz(self) -> int:
        return len(self.entries)

    def pairs(self):
        return [(a, b) for a in range(1, self.N + 1) for b in range(1, self.N + 1)]

    def columns(self) -> dict:
        cols: dict = {}
        for (r, c), v in self.entries.items():
            cols.setdefault(c, []).append((r, v))
        return cols

    def __matmul__(self, other: "RTensor") -> "RTensor":
        cols = other.columns()
        rows_of_self: dict = {}
        for (r, c), v in self.entries.items():
            rows_of_self.setdefault(c, []).append((r, v))
        out: dict = {}
        for c, lst in cols.items():
            for mid, v2 in lst:
                for r, v1 in rows_of_self.get(mid, ()):
                    k = (r, c)
                    out[k] = out.get(k, ZERO) + v1 * v2
        return RTensor(self.N, out)

    def __add__(self, other: "RTensor") -> "RTensor":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, ZERO) + v
        return RTensor(self.N, out)

    def __sub__(self, other: "RTensor") -> "RTensor":
        return self + other.scale(-ONE)

    def scale(self, c) -> "RTensor":
        c = RatFunc._coerce(c)
        return RTensor(self.N, {k: v * c for k, v in self.entries.items()})

    def __eq__(self, other):
        return isinstance(other, RTensor) and self.N == other.N and self.entries == other.entries

    def inverse(self) -> "RTensor":
        keys = self.pairs()
        inv = linalg.inverse(self.entries, keys, ONE)
        return RTensor(self.N, inv)

    def dump(self) -> str:
        """One line per nonzero entry: ``k l i j <coeff>``."""
        lines = []
        for ((k, l), (i, j)), v in sorted(self.entries.items()):
            lines.append(f"{k} {l} {i} {j} {v}")
        return "\n".join(lines)

    @classmethod
    def load(cls, N: int, text: str) -> "RTensor":
        entries = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            k, l, i, j, rest = line.split(maxsplit=4)
            entries[((int(k), int(l)), (int(i), int(j)))] = parse_ratfunc(rest)
        return cls(N, entries)

    def __repr__(self):
        return f"RTensor(N={self.N}, nnz={self.nnz()})"


def identity(N: int) -> RTensor:
    return RTensor(N, {((i, j), (i, j)): ONE for i in range(1, N + 1) for j in range(1, N + 1)})


def flip(N: int) -> RTensor:
    return RTensor(N, {((j, i), (i, j)): ONE for i in range(1, N + 1) for j in range(1, N + 1)})


def _heaviside(r: int) -> int:
    return 1 if r > 0 else 0


def build_R(series: Series) -> RTensor:
    """The closed-form R-matrix of the series.

    Entry (row (i, j), column (m, r)):

      q^(d_ij - d_{i,j'}) d_im d_jr
      + (q - 1/q) H(i - m) [ d_jm d_ir + eps * d_{j,i'} d_{m,r'} q^(rho_r - rho_j) ]

    with eps = (-1)^(fl(j) + fl(m)) in type C and eps = -1 in types B, D.
    Type A keeps only q on (i,i),(i,i), 1 on other diagonal entries and
    q - 1/q on (i,j),(j,i) for i > j.
    """
    N = series.N
    qq = Q - Q.invert()
    e: dict = {}

    def add(key, v):
        e[key] = e.get(key, ZERO) + v

    if series.tag == "A":
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                add(((i, j), (i, j)), Q if i == j else ONE)
                if i > j:
                    add(((i, j), (j, i)), qq)
        return RTensor(N, e)

    r = rho(series)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            ex = (1 if i == j else 0) - (1 if i == series.conj(j) else 0)
            add(((i, j), (i, j)), qpow(ex))
    for i in range(1, N + 1):
        for m in range(1, i):  # H(i - m) = 1
            # first bracket term: j = m, r = i
            add(((i, m), (m, i)), qq)
            # second bracket term: j = i', r = m'
            j, rr = series.conj(i), series.conj(m)
            if series.tag == "C":
                eps = series.sign(j) * series.sign(m)
            else:
                eps = -1
            add(((i, j), (m, rr)), qq * qpow(r[rr - 1] - r[j - 1]) * eps)
    return RTensor(N, e)


def rhat(R: RTensor) -> RTensor:
    """flip o R:  Rhat[(k,l),(i,j)] = R[(l,k),(i,j)]."""
    return RTensor(R.N, {((l, k), c): v for ((k, l), c), v in R.entries.items()})


def _apply12(T: RTensor, vec: dict, cols) -> dict:
    out: dict = {}
    for (a, b, c), x in vec.items():
        for (k, l), v in cols.get((a, b), ()):
            key = (k, l, c)
            out[key] = out.get(key, ZERO) + v * x
    return {k: v for k, v in out.items() if v}


def _apply23(T: RTensor, vec: dict, cols) -> dict:
    out: dict = {}
    for (a, b, c), x in vec.items():
        for (k, l), v in cols.get((b, c), ()):
            key = (a, k, l)
            out[key] = out.get(key, ZERO) + v * x
    return {k: v for k, v in out.items() if v}


def braid_check(Rh: RTensor) -> bool:
    """(Rh x I)(I x Rh)(Rh x I) == (I x Rh)(Rh x I)(I x Rh), exactly."""
    N = Rh.N
    cols = Rh.columns()
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            for c in range(1, N + 1):
                v = {(a, b, c): ONE}
                lhs = _apply12(Rh, _apply23(Rh, _apply12(Rh, v, cols), cols), cols)
                rhs = _apply23(Rh, _apply12(Rh, _apply23(Rh, v, cols), cols), cols)
                if lhs != rhs:
                    return False
    return True


def ktensor_explicit(series: Series) -> RTensor:
    """sum_{i,j} eps_i eps_j q^(rho_i - rho_j) E_{i',j} (x) E_{i,j'}.

    The signs eps are those of type C; types B, D have none.  As an
    operator, E_{a,b} (x) E_{c,d} sends e_b (x) e_d to e_a (x) e_c, so the
    (i, j) summand sits at row (i', i), column (j, j').
    """
    if series.tag == "A":
        raise ValueError("K is defined for series B, C, D only")
    N = series.N
    r = rho(series)
    e = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            s = series.sign(i) * series.sign(j)
            e[((series.conj(i), i), (j, series.conj(j)))] = qpow(r[i - 1] - r[j - 1]) * s
    return RTensor(N, e)


def ktensor_from_rhat(Rh: RTensor) -> RTensor:
    """I - (q - 1/q)^(-1) (Rh - Rh^(-1))."""
    try:
        inv = Rh.inverse()
    except ZeroDivisionError as exc:
        raise ZeroDivisionError("Rhat is singular") from exc
    c = (Q - Q.invert()).invert()
    return identity(Rh.N) - (Rh - inv).scale(c)


def displayed_k_prefactor(series: Series) -> RatFunc:
    """Scalar in front of (Rh^2 - (q - 1/q) Rh - I) in the closed-form K."""
    qq = Q - Q.invert()
    if series.tag == "C":
        n = series.n
        num = ONE - qq.invert() * (qpow(2 * n + 1) - qpow(-2 * n - 1))
        den = (-Q - qpow(-2 * n - 1)) * (Q.invert() - qpow(-2 * n - 1))
        return num / den
    if series.tag in "BD":
        N = series.N
        num = ONE + qq.invert() * (qpow(N - 1) - qpow(1 - N))
        den = (qpow(1 - N) - Q) * (Q.invert() + qpow(1 - N))
        return num / den
    raise ValueError("no K for series A")


@dataclass
class KFit:
    in_span: bool
    a: RatFunc | None = None
    b: RatFunc | None = None
    c: RatFunc | None = None
    matches_displayed: bool | None = None
    expected: tuple | None = None
    unique: bool | None = None


def k_polynomial_fit(Rh: RTensor, K: RTensor, series: Series | None = None) -> KFit:
    """Solve K = a Rh^2 + b Rh + c I exactly; compare with the closed form."""
    R2 = Rh @ Rh
    I = identity(Rh.N)
    cols = [dict(R2.entries), dict(Rh.entries), dict(I.entries)]
    x = linalg.solve_columns(cols, dict(K.entries))
    if x is None:
        return KFit(in_span=False)
    a, b, c = (x.get(k, ZERO) for k in range(3))
    # free variables are set to zero; make sure the combination is exact
    fit = R2.scale(a) + Rh.scale(b) + I.scale(c)
    if fit != K:
        return KFit(in_span=False)
    out = KFit(in_span=True, a=a, b=b, c=c)
    out.unique = linalg.rank_columns(cols) == 3
    if series is not None and series.tag != "A":
        pref = displayed_k_prefactor(series)
        qq = Q - Q.invert()
        expected = (pref, -pref * qq, -pref)
        out.expected = expected
        # compare the combinations, not the coefficients: when Rh has only
        # two eigenvalues the coefficients are not unique
        out.matches_displayed = R2.scale(expected[0]) + Rh.scale(expected[1]) + I.scale(expected[2]) == K
    return out


def mutate_R(R: RTensor, seed: int) -> tuple[RTensor, tuple]:
    """Flip the sign of one nonzero entry of R, chosen by ``seed``."""
    import random
    rng = random.Random(seed)
    keys = sorted(R.entries)
    k = keys[rng.randrange(len(keys))]
    entries = dict(R.entries)
    entries[k] = -entries[k]
    return RTensor(R.N, entries), k
