import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellscope.sdp import ConeProgram, SdpStatus, smat, solve_cone, svec

cp = pytest.importorskip("cvxpy")


def _sym(rng, k):
    g = rng.normal(size=(k, k))
    return (g + g.T) / 2


def _random_program(rng, n, k, n_lin=0, n_eq=0):
    """min c.x  s.t.  I + sum x_i F_i >= 0, plus optional rows; bounded by a PD dual point."""
    Fs = np.array([_sym(rng, k) for _ in range(n)])
    Z = rng.normal(size=(k, k))
    Z = Z @ Z.T + 0.1 * np.eye(k)
    c = np.einsum("nij,ij->n", Fs, Z)
    lin = None
    if n_lin:
        G = rng.normal(size=(n_lin, n))
        lin = (G, np.abs(rng.normal(size=n_lin)) + 0.1)  # x = 0 strictly feasible
        c = c - G.T @ rng.uniform(0.1, 1.0, size=n_lin)  # dual u > 0 keeps it bounded
    eq = None
    if n_eq:
        A = rng.normal(size=(n_eq, n))
        eq = (A, np.zeros(n_eq))
        c = c + A.T @ rng.normal(size=n_eq)
    return ConeProgram.build(c, lin=lin, psd=[(np.eye(k), Fs)], eq=eq), (c, Fs, lin, eq)


def _cvxpy_value(c, Fs, lin, eq):
    n, k = Fs.shape[0], Fs.shape[1]
    x = cp.Variable(n)
    cons = [np.eye(k) + sum(x[i] * Fs[i] for i in range(n)) >> 0]
    if lin is not None:
        cons.append(lin[0] @ x <= lin[1])
    if eq is not None:
        cons.append(eq[0] @ x == eq[1])
    prob = cp.Problem(cp.Minimize(c @ x), cons)
    prob.solve(solver="CLARABEL")
    return prob.value


def test_svec_round_trip(rng):
    M = _sym(rng, 5)
    assert np.allclose(smat(svec(M), 5), M)
    N = _sym(rng, 5)
    assert svec(M) @ svec(N) == pytest.approx(np.trace(M @ N))


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.integers(2, 6),
       st.integers(0, 3), st.integers(0, 2))
def test_matches_reference_solver(seed, n, k, n_lin, n_eq):
    rng = np.random.default_rng(seed)
    n_eq = min(n_eq, n - 1)
    prob, data = _random_program(rng, n, k, n_lin, n_eq)
    sol = solve_cone(prob)
    assert sol.status == SdpStatus.CONVERGED
    ref = _cvxpy_value(*data)
    assert sol.primal_value == pytest.approx(ref, abs=1e-6 * max(1, abs(ref)))
    assert abs(sol.primal_value - sol.dual_value) <= 1e-6 * max(1, abs(ref))
    # primal slack is PSD and matches the affine map
    S = np.eye(k) + np.einsum("n,nij->ij", sol.x, data[1])
    assert np.linalg.eigvalsh(S).min() >= -1e-9


def test_infeasible():
    # x <= -1 and the 1x1 block x >= 0
    prob = ConeProgram.build([1.0], lin=(np.array([[1.0]]), [-1.0]),
                             psd=[(np.zeros((1, 1)), np.ones((1, 1, 1)))])
    assert solve_cone(prob).status == SdpStatus.INFEASIBLE


def test_unbounded():
    prob = ConeProgram.build([-1.0], psd=[(np.zeros((1, 1)), np.ones((1, 1, 1)))])
    assert solve_cone(prob).status == SdpStatus.UNBOUNDED


def test_two_by_two_closed_form():
    # min x  s.t. [[x, 1], [1, x]] >= 0  ->  x = 1
    Fs = np.array([np.eye(2)])
    prob = ConeProgram.build([1.0], psd=[(np.array([[0.0, 1.0], [1.0, 0.0]]), Fs)])
    sol = solve_cone(prob)
    assert sol.status == SdpStatus.CONVERGED
    assert sol.x[0] == pytest.approx(1, abs=1e-8)


def test_shape_check():
    with pytest.raises(ValueError):
        ConeProgram.build([1.0, 2.0], psd=[(np.eye(2), np.zeros((1, 2, 2)))])
