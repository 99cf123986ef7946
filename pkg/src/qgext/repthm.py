"""Extensions by a central unitary and their twisted representations.

A relation system over generators t[i,j] (alphabet size n) with cofactor
data s[i,j] of degree k is extended by a central unitary W (standing for
the inverse of the central element, written as the formal ``t`` power of
an :class:`NCPoly`).  Numeric representations assign matrices to t[i,j]
and, for the extension, to W.  ``twist`` and ``untwist`` pass between
representations of the two algebras.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .coeffring import RatFunc
from .freealg import NCPoly, gen, scalar
from .rmatrix import Series

__all__ = [
    "RelationSystem",
    "build_extension",
    "from_presentation",
    "NumericRep",
    "evaluate",
    "relation_residual",
    "residual_table",
    "norm_bound",
    "twist",
    "untwist",
    "commutant_dim",
    "torus_rep",
    "shift_rep_usp2",
    "direct_sum",
    "symbolic_torus_check",
    "roundtrip_error",
    "DegreeError",
]


class DegreeError(ValueError):
    pass


def _letter_degrees(p: NCPoly) -> set:
    return {len(w.letters) for w in p.terms}


def _homogeneous(p: NCPoly, d: int) -> bool:
    return bool(p.terms) and all(len(w.letters) == d and w.tpow == 0 for w in p.terms)


@dataclass
class RelationSystem:
    n: int
    k: int
    R0: dict
    R1: list
    R3: list  # [(E, m)] meaning E - 1 with deg E = m (k + 1)
    R4: list = field(default_factory=list)
    S0: list = field(default_factory=list)  # generator labels whose commutator with W vanishes
    S3: list = field(default_factory=list)
    S4: list = field(default_factory=list)
    star_A: list = field(default_factory=list)  # ((i, j), s) meaning t[i,j]* - s
    star_Z: list = field(default_factory=list)  # ((i, j), W s) meaning t[i,j]* - W s

    def counts(self) -> dict:
        return {"R1": len(self.R1), "R3": len(self.R3), "R4": len(self.R4), "S0": len(self.S0),
                "S3": len(self.S3), "S4": len(self.S4), "star": len(self.star_Z)}


def build_extension(n: int, k: int, R0: dict, R1=(), R3=()) -> RelationSystem:
    """Materialise R4, S0, S3, S4 and both star rules from (T, k, R0, R1, R3)."""
    if k < 1:
        raise DegreeError("k must be a positive integer")
    for (i, j) in [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]:
        s = R0.get((i, j))
        if s is None:
            raise DegreeError(f"missing s[{i},{j}]")
        if s.N != n or not _homogeneous(s, k):
            raise DegreeError(f"s[{i},{j}] is not homogeneous of degree {k}")
    for p in R1:
        if len(_letter_degrees(p)) != 1 or any(w.tpow for w in p.terms):
            raise DegreeError("R1 entries must be homogeneous")
    R3 = [(E, m) for E, m in R3]
    for E, m in R3:
        if not _homogeneous(E, m * (k + 1)):
            raise DegreeError(f"R3 entry must be homogeneous of degree {m}*(k+1)")
    one = scalar(n, 1)
    R4, S4 = [], []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            d = one if i == j else NCPoly(n)
            a = sum((gen(n, i, l) * R0[(j, l)] for l in range(1, n + 1)), NCPoly(n))
            b = sum((R0[(l, i)] * gen(n, l, j) for l in range(1, n + 1)), NCPoly(n))
            R4 += [a - d, b - d]
            S4 += [a.mul_t(1) - d, b.mul_t(1) - d]
    S3 = [E.mul_t(m) - one for E, m in R3]
    labels = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    return RelationSystem(
        n, k, dict(R0), list(R1), R3, R4, labels, S3, S4,
        [(ij, R0[ij]) for ij in labels],
        [(ij, R0[ij].mul_t(1)) for ij in labels],
    )


def from_presentation(pres) -> RelationSystem:
    """Relation system of a non-tilde presentation (the algebra "A").

    The cofactor convention is t[i,j]* = s4[i,j] with s4[i,j] = s[j,i].
    """
    S = pres.series
    if pres.has_t:
        raise ValueError("expected a presentation without the central generator")
    N = pres.N
    R0 = {(i, j): pres.s[j, i] for i in range(1, N + 1) for j in range(1, N + 1)}
    k = N - 1 if S.tag == "A" else 1
    R3 = []
    if pres.variant == "special":
        m = 1 if S.tag == "A" else N // (k + 1)
        R3.append((pres.det, m))
    return build_extension(N, k, R0, list(pres.frt), R3)


# numeric representations ------------------------------------------------------

@dataclass
class NumericRep:
    dimension: int
    images: dict  # (i, j) -> ndarray, optionally "W" -> ndarray
    qval: float
    truncated: bool = False
    interior: tuple | None = None  # (lo, hi) inclusive, basis indices
    n: int | None = None

    def __post_init__(self):
        if self.n is None:
            self.n = int(round(math.sqrt(len([k for k in self.images if k != "W"]))))

    @property
    def has_w(self) -> bool:
        return "W" in self.images

    def to_json(self) -> dict:
        def enc(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]
        return {
            "dimension": self.dimension,
            "qval": self.qval,
            "truncated": self.truncated,
            "interior_range": list(self.interior) if self.interior else None,
            "images": {("W" if k == "W" else f"t[{k[0]},{k[1]}]"): enc(v) for k, v in self.images.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc: dict) -> "NumericRep":
        imgs = {}
        for k, v in doc["images"].items():
            arr = np.array([[complex(a, b) for a, b in row] for row in v])
            if k == "W":
                imgs["W"] = arr
            else:
                i, j = k[2:-1].split(",")
                imgs[(int(i), int(j))] = arr
        interior = tuple(doc["interior_range"]) if doc.get("interior_range") else None
        return cls(doc["dimension"], imgs, doc["qval"], doc["truncated"], interior)


def _coeff(c: RatFunc, qval) -> complex:
    return complex(c.evaluate(float(qval)))


def evaluate(p: NCPoly, rep: NumericRep, w_image=None) -> np.ndarray:
    """Image of p; the formal t power acts as W on the right."""
    d = rep.dimension
    eye = np.eye(d, dtype=complex)
    W = rep.images.get("W") if w_image is None else w_image
    out = np.zeros((d, d), dtype=complex)
    cache: dict = {(): eye}
    for w, c in p.terms.items():
        m = cache.get(w.letters)
        if m is None:
            m = eye
            for lt in w.letters:
                if lt not in rep.images:
                    raise KeyError(f"missing image for t{list(lt)}")
                m = m @ rep.images[lt]
            cache[w.letters] = m
        if w.tpow:
            if W is None:
                raise KeyError("missing image for W")
            m = m @ np.linalg.matrix_power(W, w.tpow)
        out += _coeff(c, rep.qval) * m
    return out


def _restrict(M: np.ndarray, rep: NumericRep) -> np.ndarray:
    if rep.truncated and rep.interior is not None:
        lo, hi = rep.interior
        return M[:, lo:hi + 1]
    return M


def _norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def residual_table(rep: NumericRep, sys: RelationSystem) -> dict:
    """Family name -> max residual.  Uses the extension relations when the
    rep carries W, the base relations otherwise."""
    fams: dict = {}

    def put(name, M):
        fams[name] = max(fams.get(name, 0.0), _norm(_restrict(M, rep)))

    for p in sys.R1:
        put("R1", evaluate(p, rep))
    if rep.has_w:
        W = rep.images["W"]
        for lab in sys.S0:
            T = rep.images[lab]
            put("S0", W @ T - T @ W)
        for p in sys.S3:
            put("S3", evaluate(p, rep))
        for p in sys.S4:
            put("S4", evaluate(p, rep))
        for lab, s in sys.star_Z:
            put("star", rep.images[lab].conj().T - evaluate(s, rep))
        put("W-unitary", W @ W.conj().T - np.eye(rep.dimension))
    else:
        for E, _m in sys.R3:
            put("R3", evaluate(E, rep) - np.eye(rep.dimension))
        for p in sys.R4:
            put("R4", evaluate(p, rep))
        for lab, s in sys.star_A:
            put("star", rep.images[lab].conj().T - evaluate(s, rep))
    return fams


def relation_residual(rep: NumericRep, sys: RelationSystem) -> float:
    return max(residual_table(rep, sys).values(), default=0.0)


def norm_bound(rep: NumericRep) -> float:
    return max(_norm(v) for v in rep.images.values())


# twisting ---------------------------------------------------------------------

def twist(rep: NumericRep, lam: complex, k: int, tol: float = 1e-12) -> NumericRep:
    """t[i,j] -> lam t[i,j] and W -> conj(lam)^(k+1)."""
    lam = complex(lam)
    if abs(abs(lam) - 1) > tol:
        raise ValueError("lambda must have modulus 1")
    if rep.has_w:
        raise ValueError("input already carries W; twist a representation of the base algebra")
    imgs = {lab: lam * m for lab, m in rep.images.items()}
    imgs["W"] = (lam.conjugate() ** (k + 1)) * np.eye(rep.dimension, dtype=complex)
    return NumericRep(rep.dimension, imgs, rep.qval, rep.truncated, rep.interior, rep.n)


def principal_root(z: complex, m: int) -> complex:
    """The m-th root of z with argument in [0, 2 pi / m)."""
    arg = cmath.phase(z) % (2 * math.pi)
    return abs(z) ** (1 / m) * cmath.exp(1j * arg / m)


def untwist(rep: NumericRep, k: int, tol: float = 1e-10) -> tuple[complex, NumericRep]:
    """Split a rep of the extension with scalar W = mu I into (lam, base rep).

    lam solves conj(lam)^(k+1) = mu (principal root of conj(mu)), and the
    base rep is conj(lam) times the t-images, so twist(base, lam) == rep.
    """
    if not rep.has_w:
        raise ValueError("representation has no W image")
    W = rep.images["W"]
    d = rep.dimension
    mu = complex(np.trace(W)) / d
    if _norm(W - mu * np.eye(d)) > tol:
        raise ValueError("W is not scalar: the representation is reducible or invalid")
    if abs(abs(mu) - 1) > tol:
        raise ValueError("W is not unitary")
    lam = principal_root(mu.conjugate(), k + 1)
    imgs = {lab: lam.conjugate() * m for lab, m in rep.images.items() if lab != "W"}
    return lam, NumericRep(d, imgs, rep.qval, rep.truncated, rep.interior, rep.n)


def roundtrip_error(rep: NumericRep, lam: complex, k: int) -> float:
    """max |twist(untwist(twist(rep, lam))) - twist(rep, lam)| over images."""
    z = twist(rep, lam, k)
    lam2, base = untwist(z, k)
    z2 = twist(base, lam2, k)
    return max(_norm(z.images[lab] - z2.images[lab]) for lab in z.images)


# commutant --------------------------------------------------------------------

def commutant_dim(rep: NumericRep, tol: float = 1e-9) -> int:
    """dim {X : X g = g X and X g* = g* X for every generator image g}."""
    if rep.truncated:
        raise ValueError("commutant of a truncated model is not meaningful")
    d = rep.dimension
    eye = np.eye(d)
    blocks = []
    for m in rep.images.values():
        for a in (m, m.conj().T):
            # vec(X a - a X) = (a^T (x) I - I (x) a) vec(X) in column-major vec
            blocks.append(np.kron(a.T, eye) - np.kron(eye, a))
    if not blocks:
        return d * d
    A = np.vstack(blocks)
    sv = np.linalg.svd(A, compute_uv=False)
    scale = max(1.0, sv[0] if sv.size else 1.0)
    return int(d * d - np.sum(sv > tol * scale))


def direct_sum(*reps: NumericRep) -> NumericRep:
    labels = set(reps[0].images)
    for r in reps[1:]:
        if set(r.images) != labels:
            raise ValueError("summands have different generators")
    d = sum(r.dimension for r in reps)
    imgs = {}
    for lab in labels:
        M = np.zeros((d, d), dtype=complex)
        o = 0
        for r in reps:
            M[o:o + r.dimension, o:o + r.dimension] = r.images[lab]
            o += r.dimension
        imgs[lab] = M
    return NumericRep(d, imgs, reps[0].qval, n=reps[0].n)


# concrete models --------------------------------------------------------------

def torus_rep(series: Series | str, N: int | None = None, angles=(), qval: float = 0.5,
              variant: str = "plain", tol: float = 1e-12) -> NumericRep:
    """One-dimensional rep t[i,j] -> delta_ij lam_i.

    B/C/D need lam[N+1-j] = 1/lam[j]; special variants also need the
    determinant image to be 1 (for A that is prod lam = 1).
    """
    if not isinstance(series, Series):
        series = Series(series, N)
    N = series.N
    lam = [complex(a) for a in angles]
    if len(lam) != N:
        raise ValueError(f"need {N} diagonal values")
    if any(abs(abs(z) - 1) > tol for z in lam):
        raise ValueError("diagonal values must have modulus 1")
    if series.tag != "A":
        for j in range(N):
            if abs(lam[j] * lam[N - 1 - j] - 1) > tol:
                raise ValueError(f"constraint lam[{N - j}] = 1/lam[{j + 1}] violated")
    imgs = {(i, j): np.array([[lam[i - 1] if i == j else 0]], dtype=complex)
            for i in range(1, N + 1) for j in range(1, N + 1)}
    rep = NumericRep(1, imgs, qval, n=N)
    if variant.startswith("special"):
        from .frtfamily import quantum_determinant
        if series.tag == "B":
            raise ValueError("no determinant for the odd orthogonal series")
        D = quantum_determinant(series, reading="epsilon") if series.tag == "D" else quantum_determinant(series)
        dv = evaluate(D, rep)[0, 0]
        if abs(dv - 1) > 1e-10:
            raise ValueError(f"determinant constraint violated: D -> {dv}")
    return rep


def shift_rep_usp2(L: int, qval: float) -> NumericRep:
    """Truncated weighted-shift model of the rank-one symplectic algebra.

    With mu = q^2: alpha e_m = sqrt(1 - mu^(2m)) e_(m-1), gamma e_m = mu^m e_m,
    and V = [[alpha, -mu gamma*], [gamma, alpha*]] on span{e_0..e_L}.
    """
    if not 0 < qval < 1:
        raise ValueError("need 0 < q < 1")
    if L < 3:
        raise ValueError("truncation level must be at least 3")
    mu = qval ** 2
    d = L + 1
    alpha = np.zeros((d, d), dtype=complex)
    gamma = np.zeros((d, d), dtype=complex)
    for m in range(d):
        gamma[m, m] = mu ** m
        if m >= 1:
            alpha[m - 1, m] = math.sqrt(1 - mu ** (2 * m))
    imgs = {(1, 1): alpha, (1, 2): -mu * gamma.conj().T, (2, 1): gamma, (2, 2): alpha.conj().T}
    # relations have degree <= 2, so columns up to L - 2 never see the cut
    return NumericRep(d, imgs, qval, truncated=True, interior=(0, L - 2), n=2)


# exact one-dimensional check --------------------------------------------------

def _ratfunc_to_sympy(c: RatFunc, u):
    import sympy as sp
    num = sum(sp.Rational(v.numerator, v.denominator) * u ** e for e, v in c.num.terms.items())
    den = sum(sp.Rational(v.numerator, v.denominator) * u ** e for e, v in c.den.terms.items())
    return num / den


def symbolic_torus_check(pres_base) -> dict:
    """Exact check, with symbolic angles and twist, that twisted torus reps
    of a base presentation satisfy every extension relation.

    The diagonal values are z_1..z_n and their inverses (or, for A, free
    symbols with the last fixed by the determinant in the special case);
    lam is a symbolic unit.  Returns family -> number of relations that
    simplify to zero, plus "failures".
    """
    import sympy as sp

    sys = from_presentation(pres_base)
    S = pres_base.series
    N = pres_base.N
    u = sp.symbols("u", positive=True)
    lam = sp.symbols("lam", nonzero=True)
    zs = sp.symbols(f"z1:{N + 1}", nonzero=True)
    if S.tag == "A":
        diag = list(zs[:N])
        if pres_base.variant == "special":
            diag[-1] = 1 / sp.Mul(*zs[:N - 1])
    else:
        n = N // 2
        diag = [None] * N
        for j in range(n):
            diag[j] = zs[j]
            diag[N - 1 - j] = 1 / zs[j]
        if N % 2:
            diag[n] = sp.Integer(1)
    unit_syms = [lam] + list(zs)

    def conj(expr):
        return expr.subs({s: 1 / s for s in unit_syms}, simultaneous=True)

    img = {(i, j): (lam * diag[i - 1] if i == j else sp.Integer(0))
           for i in range(1, N + 1) for j in range(1, N + 1)}
    W = conj(lam) ** (sys.k + 1)

    def ev(p: NCPoly):
        acc = sp.Integer(0)
        for w, c in p.terms.items():
            term = _ratfunc_to_sympy(c, u)
            for lt in w.letters:
                term = term * img[lt]
            acc += term * W ** w.tpow
        return sp.simplify(acc)

    out = {"S0": len(sys.S0), "failures": []}
    for name, rels in (("R1", sys.R1), ("S3", sys.S3), ("S4", sys.S4)):
        ok = 0
        for k_, p in enumerate(rels):
            if ev(p) == 0:
                ok += 1
            else:
                out["failures"].append(f"{name}[{k_}]")
        out[name] = ok
    ok = 0
    for lab, s in sys.star_Z:
        if sp.simplify(conj(img[lab]) - ev(s)) == 0:
            ok += 1
        else:
            out["failures"].append(f"star{list(lab)}")
    out["star"] = ok
    return out
