import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.stats import ortho_group

from qgext.classical import (GROUPS, branch_check, characterize, closure_check, display_sweep,
                             map_upsilon, map_wp, map_xi, sample, structure_matrices)

ranks = st.integers(1, 4)


@given(ranks)
def test_structure_matrices(n):
    sm = structure_matrices(n)
    I = np.eye(2 * n)
    assert np.allclose(sm.J @ sm.J, -I) and np.allclose(sm.K @ sm.K, -I)
    assert np.allclose(sm.S @ sm.J @ np.linalg.inv(sm.S), sm.K)
    for Q in (sm.Q_even, sm.Q_odd):
        assert np.allclose(Q @ Q.T, np.eye(Q.shape[0]))
    odd = structure_matrices(n, "bare").Q_odd
    assert not np.allclose(odd @ odd.T, np.eye(2 * n + 1))


@given(ranks, st.integers(0, 2 ** 32 - 1))
def test_wp_lands_in_cross_form(n, seed):
    for N in (2 * n, 2 * n + 1):
        M = ortho_group.rvs(N, random_state=seed)
        W = map_wp(M)
        assert np.allclose(W @ W.conj().T, np.eye(N))
        lam, res = characterize(W, "C")
        assert res < 1e-10 and abs(lam - 1) < 1e-10


def test_literal_wp_misses_odd_sizes():
    M = ortho_group.rvs(5, random_state=1)
    _, res = characterize(map_wp(M, "literal"), "C")
    assert res > 1e-3


@given(ranks, st.integers(0, 2 ** 32 - 1))
def test_symplectic_oracle(n, seed):
    # scipy expm of a Lie algebra element, checked against J directly
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    X = np.block([[A - A.conj().T, B + B.T], [-(B + B.T).conj(), (A - A.conj().T).conj()]]) / 2
    M = expm(X)
    J = structure_matrices(n).J
    assert np.allclose(M.T @ J @ M, J)
    lam, res = characterize(map_upsilon(M), "K")
    assert res < 1e-10 and abs(lam - 1) < 1e-10


def test_xi():
    U = expm(1j * np.array([[0.3, 0.2], [0.2, -0.1]]))
    X = map_xi(U)
    assert abs(np.linalg.det(X) - 1) < 1e-12
    with pytest.raises(ValueError):
        map_xi(2 * U)


def test_sampling_is_seeded():
    for g in GROUPS:
        a, b = sample(g, 2, seed=5), sample(g, 2, seed=5)
        assert np.array_equal(a.matrix, b.matrix)
    with pytest.raises(ValueError):
        sample("gl", 2)


@pytest.mark.parametrize("group", GROUPS)
def test_sweeps(group):
    assert display_sweep(group, 2, trials=20, seed=3)["passed"]
    assert closure_check(group, 2, trials=20, seed=3)["passed"]


def test_branches():
    n = 2
    s = sample("sot", n, seed=0)
    lam, _ = characterize(s.matrix, "C")
    assert branch_check(s.matrix, lam) == "positive"
    # a reflection times a unit scalar sits on the other branch
    R = np.diag([-1.0, 1, 1, 1])
    mu = np.exp(0.7j)
    M = map_wp(mu * R)
    lam, _ = characterize(M, "C")
    assert abs(lam - mu ** 2) < 1e-12
    assert branch_check(M, lam) == "negative"
    with pytest.raises(ValueError):
        branch_check(np.eye(3), 1)
    with pytest.raises(ValueError):
        branch_check(np.diag([1, 2, 1, 1]), 1)


def test_non_member_residual():
    _, res = characterize(np.diag([1, 2, 1, 1]).astype(complex), "C")
    assert res > 0.1
