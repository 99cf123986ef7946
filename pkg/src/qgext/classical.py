"""Classical groups preserving a bilinear form up to a unit scalar.

Structure matrices, the maps Xi, Upsilon and wp, seeded samplers and the
numeric characterisations of USp, O, SO and their tilde versions.  M^t is
always the plain transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

__all__ = [
    "StructureMatrices",
    "GroupSample",
    "GROUPS",
    "structure_matrices",
    "cross_identity",
    "sample",
    "map_xi",
    "map_upsilon",
    "map_wp",
    "characterize",
    "branch_check",
    "closure_check",
    "display_sweep",
]

GROUPS = ("usp", "o", "so", "uspt", "ot", "sot")
_NAMES = {"usp": "USp", "o": "O", "so": "SO", "uspt": "USp~", "ot": "O~", "sot": "SO~"}


def cross_identity(n: int) -> np.ndarray:
    return np.fliplr(np.eye(n))


@dataclass
class StructureMatrices:
    n: int
    J: np.ndarray  # 2n
    K: np.ndarray  # 2n
    S: np.ndarray  # 2n
    C: np.ndarray  # n
    Q_even: np.ndarray  # 2n
    Q_odd: np.ndarray  # 2n + 1
    sqrtD_plus_even: np.ndarray
    sqrtD_minus_even: np.ndarray
    sqrtD_plus_odd: np.ndarray
    sqrtD_minus_odd: np.ndarray

    def Q(self, N: int) -> np.ndarray:
        return self.Q_even if N == 2 * self.n else self.Q_odd

    def sqrtD(self, N: int, sign: int) -> np.ndarray:
        if N == 2 * self.n:
            return self.sqrtD_plus_even if sign > 0 else self.sqrtD_minus_even
        return self.sqrtD_plus_odd if sign > 0 else self.sqrtD_minus_odd


def structure_matrices(n: int, odd_middle: str = "unit") -> StructureMatrices:
    """The structure matrices for size 2n (and 2n + 1 for Q, sqrt D).

    ``odd_middle="unit"`` puts sqrt(2) in the middle of Q_(2n+1) before the
    1/sqrt(2) prefactor so that Q is orthogonal; ``"bare"`` keeps a bare 1.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    I = np.eye(n)
    Z = np.zeros((n, n))
    C = cross_identity(n)
    J = np.block([[Z, I], [-I, Z]])
    K = np.block([[Z, C], [-C, Z]])
    S = np.block([[I, Z], [Z, C]])
    Qe = np.block([[I, I], [C, -C]]) / np.sqrt(2)
    mid = np.sqrt(2) if odd_middle == "unit" else 1.0
    zc, zr = np.zeros((n, 1)), np.zeros((1, n))
    Qo = np.block([[I, zc, I], [zr, np.full((1, 1), mid), zr], [C, zc, -C]]) / np.sqrt(2)
    dpe = np.diag([1] * n + [1j] * n)
    dpo = np.diag([1] * (n + 1) + [1j] * n)
    return StructureMatrices(n, J, K, S, C, Qe, Qo, dpe, dpe.conj(), dpo, dpo.conj())


# maps -------------------------------------------------------------------------

def _is_unitary(A, tol):
    return np.linalg.norm(A @ A.conj().T - np.eye(A.shape[0])) <= tol


def map_xi(A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """A -> diag(A, det(A)^-1)."""
    A = np.asarray(A, dtype=complex)
    if not _is_unitary(A, tol):
        raise ValueError("input is not unitary")
    n = A.shape[0]
    out = np.zeros((n + 1, n + 1), dtype=complex)
    out[:n, :n] = A
    out[n, n] = 1 / np.linalg.det(A)
    return out


def map_upsilon(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    N = M.shape[0]
    if N % 2 or M.shape != (N, N):
        raise ValueError("Upsilon needs an even square matrix")
    S = structure_matrices(N // 2).S
    return S @ M @ np.linalg.inv(S)


def map_wp(M: np.ndarray, form: str = "corrected") -> np.ndarray:
    """Conjugation taking real orthogonal matrices to the cross-diagonal form.

    ``corrected``: Q sqrtD_- M sqrtD_+ Q^t.  ``literal``: sqrtD_- Q^t M Q sqrtD_+
    with the unnormalised odd Q; the latter misses the C-form (kept for
    comparison).
    """
    M = np.asarray(M)
    N = M.shape[0]
    if M.shape != (N, N) or N < 2:
        raise ValueError("wp needs a square matrix of size >= 2")
    sm = structure_matrices(N // 2, "unit" if form == "corrected" else "bare")
    Q, dp, dm = sm.Q(N), sm.sqrtD(N, +1), sm.sqrtD(N, -1)
    if form == "corrected":
        return Q @ dm @ M @ dp @ Q.T
    if form == "literal":
        return dm @ Q.T @ M @ Q @ dp
    raise ValueError(f"unknown form {form!r}")


# characterisation -------------------------------------------------------------

def _form(form: str, N: int) -> np.ndarray:
    if form == "C":
        return cross_identity(N)
    if N % 2:
        raise ValueError(f"form {form} needs even size")
    sm = structure_matrices(N // 2)
    if form == "K":
        return sm.K
    if form == "J":
        return sm.J
    raise ValueError(f"unknown form {form!r}")


def characterize(M: np.ndarray, form: str = "C") -> tuple[complex, float]:
    """lambda = tr(M F M^t F^t) / N and the residual |M F M^t F^t - lambda I|."""
    M = np.asarray(M, dtype=complex)
    N = M.shape[0]
    F = _form(form, N)
    X = M @ F @ M.T @ F.T
    lam = complex(np.trace(X)) / N
    return lam, float(np.linalg.norm(X - lam * np.eye(N), 2))


def branch_check(M: np.ndarray, lam: complex, tol: float = 1e-8) -> str:
    """"positive" if det M = lam^n, "negative" if det M = -lam^n (size 2n)."""
    M = np.asarray(M, dtype=complex)
    N = M.shape[0]
    if N % 2:
        raise ValueError("branch check needs even size")
    _, res = characterize(M, "C")
    if res > tol:
        raise ValueError(f"not in the tilde orthogonal set (residual {res:.2e})")
    d = np.linalg.det(M)
    ln = lam ** (N // 2)
    if abs(d - ln) <= tol:
        return "positive"
    if abs(d + ln) <= tol:
        return "negative"
    raise ValueError("determinant matches neither branch")


# sampling ---------------------------------------------------------------------

@dataclass
class GroupSample:
    matrix: np.ndarray  # in the form used by the characterisation (U(N))
    group: str
    lam: complex | None = None
    raw: np.ndarray | None = None  # matrix before Upsilon / wp


def _usp_lie(n: int, rng) -> np.ndarray:
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    A = (A - A.conj().T) / 2
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    B = (B + B.T) / 2
    return np.block([[A, B], [-B.conj(), A.conj()]])


def _orth(N: int, rng, det: int = 1) -> np.ndarray:
    A = rng.normal(size=(N, N))
    M = expm(A - A.T)
    if det < 0:
        R = np.eye(N)
        R[0, 0] = -1
        M = R @ M
    return M


def sample(group: str, n: int, seed=None, size: int | None = None) -> GroupSample:
    """Seeded sample.  ``n`` is the rank: USp groups and SO~ live in size
    2n; O, O~ and SO in size ``size`` (default 2n).

    The returned ``matrix`` is the characterisation form: Upsilon(M) for
    USp, wp(M) for the orthogonal groups.
    """
    if group not in GROUPS:
        raise ValueError(f"unknown group {group!r}")
    rng = np.random.default_rng(seed)
    N = size if size is not None and group in ("o", "ot", "so") else 2 * n
    mu = np.exp(2j * np.pi * rng.random()) if group.endswith("t") else 1.0
    if group in ("usp", "uspt"):
        M0 = expm(_usp_lie(n, rng))
        raw = mu * M0
        return GroupSample(map_upsilon(raw), _NAMES[group], mu ** 2 if group == "uspt" else None, raw)
    det = 1
    if group in ("o", "ot"):
        det = 1 if rng.random() < 0.5 else -1
    M0 = _orth(N, rng, det)
    raw = mu * M0
    return GroupSample(map_wp(raw), _NAMES[group], mu ** 2 if group.endswith("t") else None, raw)


# sweeps -----------------------------------------------------------------------

def _form_for(group: str) -> str:
    return "K" if group.startswith("usp") else "C"


def display_sweep(group: str, n: int, trials: int = 100, seed: int = 0, tol: float = 1e-10,
                  size: int | None = None) -> dict:
    """Check the defining display of ``group`` on seeded samples."""
    worst_res = 0.0
    worst_lam = 0.0
    worst_unit = 0.0
    worst_det = 0.0
    worst_xi = 0.0
    worst_direct = 0.0
    for k in range(trials):
        s = sample(group, n, seed=(seed, k), size=size)
        M = s.matrix
        N = M.shape[0]
        lam, res = characterize(M, _form_for(group))
        expect = s.lam if s.lam is not None else 1.0
        worst_res = max(worst_res, res)
        worst_lam = max(worst_lam, abs(lam - expect))
        worst_unit = max(worst_unit, float(np.linalg.norm(M @ M.conj().T - np.eye(N), 2)))
        X = map_xi(M)
        worst_xi = max(worst_xi, abs(np.linalg.det(X) - 1))
        if group == "so":
            worst_det = max(worst_det, abs(np.linalg.det(M) - 1))
        if group == "sot":
            worst_det = max(worst_det, abs(np.linalg.det(M) - lam ** (N // 2)))
        if group == "ot" and N % 2 == 0:
            worst_det = max(worst_det, abs(np.linalg.det(M) ** 2 - lam ** N))
        if group.startswith("usp"):
            # the direct J description of the same element
            lj, rj = characterize(s.raw, "J")
            worst_direct = max(worst_direct, rj, abs(lj - lam))
    out = {
        "group": _NAMES[group], "n": n, "trials": trials, "seed": seed,
        "max_residual": worst_res, "max_lambda_error": worst_lam,
        "max_unitarity_error": worst_unit, "max_xi_det_error": worst_xi,
    }
    checks = [worst_res <= tol, worst_lam <= tol, worst_unit <= tol, worst_xi <= tol]
    if group in ("so", "sot", "ot"):
        out["max_det_error"] = worst_det
        checks.append(worst_det <= (1e-8 if group != "so" else tol))
    if group.startswith("usp"):
        out["max_direct_vs_upsilon"] = worst_direct
        checks.append(worst_direct <= tol)
    out["passed"] = all(checks)
    return out


def closure_check(group: str, n: int, trials: int = 100, seed: int = 0, tol: float = 1e-8,
                  size: int | None = None) -> dict:
    """Products and inverses stay in the set and lambda is multiplicative."""
    form = _form_for(group)
    worst_res = worst_mult = worst_inv = 0.0
    for k in range(trials):
        a = sample(group, n, seed=(seed, k, 0), size=size).matrix
        b = sample(group, n, seed=(seed, k, 1), size=size).matrix
        la, _ = characterize(a, form)
        lb, _ = characterize(b, form)
        lab, rab = characterize(a @ b, form)
        linv, rinv = characterize(np.linalg.inv(a), form)
        worst_res = max(worst_res, rab, rinv)
        worst_mult = max(worst_mult, abs(lab - la * lb))
        worst_inv = max(worst_inv, abs(linv * la - 1))
    N = sample(group, n, seed=(seed, 0, 0), size=size).matrix.shape[0]
    lid, rid = characterize(np.eye(N), form)
    return {
        "group": _NAMES[group], "n": n, "trials": trials, "seed": seed,
        "max_residual": worst_res, "max_multiplicativity_error": worst_mult,
        "max_inverse_error": worst_inv, "identity_lambda": [lid.real, lid.imag],
        "passed": max(worst_res, worst_mult, worst_inv, abs(lid - 1), rid) <= tol,
    }
