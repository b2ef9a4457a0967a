import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from bellscope.corrgeom import deterministic_matrix, pr_box
from bellscope.cubic import CubicPoly, cubic_roots, smallest_positive_root
from bellscope.simplex import LinearProgram, LpStatus, solve_lp


def test_bounded_max():
    out = solve_lp(LinearProgram(np.array([1.0]), A_ub=np.array([[1.0]]), b_ub=np.array([1.0]),
                                 bounds=[(0.0, None)], maximize=True))
    assert out.status is LpStatus.OPTIMAL and out.value == pytest.approx(1)


def test_infeasible_pair():
    out = solve_lp(LinearProgram(np.array([0.0]), A_ub=np.array([[1.0], [-1.0]]),
                                 b_ub=np.array([0.0, -1.0]), bounds=[(None, None)]))
    assert out.status is LpStatus.INFEASIBLE


def test_functional_bounded_on_vertices():
    # |B.P_d| <= 1 on all local vertices caps B.P_PR at 2 (CHSH / 2 attains it)
    D = deterministic_matrix()
    out = solve_lp(LinearProgram(pr_box(0, 0, 1).vector(), A_ub=np.vstack([D.T, -D.T]),
                                 b_ub=np.ones(32), bounds=[(None, None)] * 16, maximize=True))
    assert out.status is LpStatus.OPTIMAL and out.value == pytest.approx(2, abs=1e-9)
    # one-sided bounds leave the direction B = t (CHSH - 1/2) free
    out = solve_lp(LinearProgram(pr_box(0, 0, 1).vector(), A_ub=D.T, b_ub=np.ones(16),
                                 bounds=[(None, None)] * 16, maximize=True))
    assert out.status is LpStatus.UNBOUNDED


def _random_lp(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    m_ub, m_eq = int(rng.integers(0, 6)), int(rng.integers(0, 3))
    x0 = rng.uniform(0, 1, size=n)  # keeps most instances feasible
    A_ub = rng.normal(size=(m_ub, n))
    b_ub = A_ub @ x0 + rng.uniform(0, 1, size=m_ub) - (0.5 if rng.random() < 0.1 else 0)
    A_eq = rng.normal(size=(m_eq, n))
    b_eq = A_eq @ x0
    lo = rng.choice([0.0, -1.0, None], size=n)
    hi = rng.choice([None, 2.0], size=n)
    bounds = [(l, h) for l, h in zip(lo, hi)]
    c = rng.normal(size=n)
    return c, A_ub, b_ub, A_eq, b_eq, bounds


@given(st.integers(0, 2 ** 32 - 1))
def test_matches_scipy_linprog(seed):
    c, A_ub, b_ub, A_eq, b_eq, bounds = _random_lp(seed)
    ours = solve_lp(LinearProgram(c, A_eq=A_eq if len(A_eq) else None, b_eq=b_eq if len(A_eq) else None,
                                  A_ub=A_ub if len(A_ub) else None, b_ub=b_ub if len(A_ub) else None,
                                  bounds=bounds))
    ref = linprog(c, A_ub=A_ub if len(A_ub) else None, b_ub=b_ub if len(A_ub) else None,
                  A_eq=A_eq if len(A_eq) else None, b_eq=b_eq if len(A_eq) else None,
                  bounds=bounds, method="highs")
    expected = {0: LpStatus.OPTIMAL, 2: LpStatus.INFEASIBLE, 3: LpStatus.UNBOUNDED}[ref.status]
    assert ours.status is expected
    if expected is LpStatus.OPTIMAL:
        assert ours.value == pytest.approx(ref.fun, abs=1e-7)
        x = ours.x
        if len(A_ub):
            assert np.all(A_ub @ x <= b_ub + 1e-9)
        if len(A_eq):
            assert np.allclose(A_eq @ x, b_eq, atol=1e-9)


def test_degenerate_cycling_example():
    # Beale's example cycles under naive Dantzig pricing
    c = np.array([-0.75, 150, -0.02, 6])
    A = np.array([[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]])
    b = np.array([0, 0, 1.0])
    out = solve_lp(LinearProgram(c, A_ub=A, b_ub=b, bounds=[(0.0, None)] * 4))
    assert out.status is LpStatus.OPTIMAL and out.value == pytest.approx(-0.05)


def test_cubic_roots():
    assert smallest_positive_root((1, 26, -36, -104)) == pytest.approx(2.6353, abs=1e-4)
    assert smallest_positive_root((1, -9, -1, 1)) == pytest.approx(0.2862, abs=1e-4)
    assert cubic_roots((1, 0, 0, -1))[0] == pytest.approx(1)
    with pytest.raises(ValueError):
        CubicPoly((0, 1, 2, 3))


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_cubic_roots_residual(r):
    p = CubicPoly(tuple(np.poly(r)))
    for z in cubic_roots(p):
        scale = max(1.0, abs(z)) ** 3 * 30
        assert abs(p(z)) <= 1e-11 * scale
    assert np.allclose(sorted(np.real(cubic_roots(p))), sorted(r), atol=1e-4)
