import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellscope.catalog import class4b_form, named_point
from bellscope.corrgeom import (
    CANONICAL_PATTERNS,
    CELLS,
    ClassLabel,
    InvalidCorrelation,
    Correlation,
    ZeroPattern,
    apply_relabeling,
    chsh_value,
    deterministic_matrix,
    deterministic_point,
    mix,
    pr_box,
    relabeling_group,
    uniform,
)
from bellscope.lpcert import (
    CERTIFIABLE,
    certify_nonexposed,
    local_membership,
    nonexposed_dual_check,
    nonexposed_dual_lp,
    nonexposed_primal,
    ns_zero_feasibility,
    saturating_points,
    t_vector,
)
from bellscope.qstrategy import Povm, PureState, Strategy, born
from bellscope.simplex import LpStatus

from conftest import random_qubit_strategy, random_unitary

NS_VERTICES = [deterministic_point(j) for j in range(16)] + [
    pr_box(*bits) for bits in itertools.product(range(2), repeat=3)
]


def test_deterministic_points_inside_with_unit_weight():
    for j in range(16):
        m = local_membership(deterministic_point(j))
        assert m.inside
        e = np.zeros(16)
        e[j] = 1
        assert np.allclose(m.weights, e, atol=1e-9)


def test_pr_box_outside():
    pr = pr_box(0, 0, 1)
    m = local_membership(pr)
    assert not m.inside
    assert m.violation(pr) > 1e-6


def test_membership_rejects_invalid_table():
    p = np.full((2, 2, 2, 2), 0.25)
    p[0, 0, 0, 0] = -0.25
    p[1, 1, 0, 0] = 0.75
    with pytest.raises(InvalidCorrelation):
        local_membership(Correlation(p))


@given(st.lists(st.floats(0, 1), min_size=16, max_size=16).filter(lambda w: sum(w) > 1e-3))
def test_membership_weights_reconstruct(w):
    w = np.asarray(w) / sum(w)
    c = mix(list(zip(w, NS_VERTICES[:16])))
    m = local_membership(c)
    assert m.inside
    assert m.weights.min() >= -1e-9
    assert np.abs(deterministic_matrix() @ m.weights - c.vector()).max() <= 1e-9


def test_class4b_family_is_local(rng):
    for _ in range(100):
        al = rng.uniform(0.05, math.pi / 2 - 0.05)
        c = born(class4b_form(math.pi / 4, al, al))
        assert local_membership(c).inside
        assert abs(chsh_value(c)) <= 2 + 1e-9


def test_ns_zero_feasibility_examples():
    assert not ns_zero_feasibility(CANONICAL_PATTERNS[ClassLabel.C4A])
    assert ns_zero_feasibility(CANONICAL_PATTERNS[ClassLabel.C3B])
    assert ns_zero_feasibility(ZeroPattern(frozenset()))


def test_zero_set_of_quantum_point_is_ns_feasible():
    c = named_point("q")[1]
    assert ns_zero_feasibility(ZeroPattern(frozenset(cell for cell in CELLS if c.p[cell] <= 1e-12)))


@given(st.sets(st.sampled_from(CELLS), max_size=8), st.sampled_from(CELLS))
def test_ns_zero_feasibility_monotone(cells, extra):
    small = ZeroPattern(frozenset(cells))
    big = ZeroPattern(frozenset(cells | {extra}))
    if not ns_zero_feasibility(small, exact=False):
        assert not ns_zero_feasibility(big, exact=False)


SHARED_ROW = [(0, 0, 0, 0), (0, 0, 1, 0)]  # row (y, b) = (0, 0), columns (x, a) = (0, 0), (1, 0)
ROW_FACE = [v for v in NS_VERTICES if all(v.p[cell] == 0 for cell in SHARED_ROW)]


def _proj(v):
    return np.outer(v, v.conj())


def _shared_row_quantum(rng):
    """A qubit strategy with p(0,0|0,0) = p(0,0|1,0) = 0.

    p(0,0|0,0) = 0 removes the |e_{0|0} f_{0|0}> component of the state; the
    second zero then fixes Alice's x=1 basis whenever that leaves an entangled
    state. Occasionally the state is left separable instead.
    """
    ua, ub0, ub1 = (random_unitary(rng) for _ in range(3))
    e, f = ua.T, ub0.T  # rows are basis vectors
    coef = rng.normal(size=3) + 1j * rng.normal(size=3)
    if rng.random() < 0.1:
        coef[0] = 0  # c_10 = 0: product state e_{0|0} (x) f_{1|0}
    coef /= np.linalg.norm(coef)
    psi = coef[0] * np.kron(e[1], f[0]) + coef[1] * np.kron(e[0], f[1]) + coef[2] * np.kron(e[1], f[1])
    if coef[0] == 0:
        a1 = random_unitary(rng).T
    else:
        a1 = np.array([e[0] * np.exp(1j * rng.uniform(0, 6)), e[1]])
    povm = lambda rows: Povm((_proj(rows[0]), _proj(rows[1])))
    return Strategy(PureState.normalized(psi), (povm(e), povm(a1)), (povm(f), povm(ub1.T)))


def _shared_row_points(rng, n):
    """Quantum points vanishing on two cells of one table row, mixed and relabeled."""
    group = relabeling_group()
    out = []
    for _ in range(n):
        c1, c2 = born(_shared_row_quantum(rng)), born(_shared_row_quantum(rng))
        lam = rng.uniform()
        c = mix([(lam, c1), (1 - lam, c2)])
        assert all(c.p[cell] <= 1e-12 for cell in SHARED_ROW)
        out.append(apply_relabeling(c, group[rng.integers(len(group))]))
    return out


def test_lemma_one_suite():
    rng = np.random.default_rng(5)
    for c in _shared_row_points(rng, 1000):
        assert local_membership(c).inside


def test_shared_row_face_of_ns_contains_pr_box():
    # the statement is about quantum points: the NS face itself is not local
    pr = [v for v in ROW_FACE if abs(chsh_value(v)) == 4]
    assert pr and not local_membership(pr[0]).inside


def test_t_vector_examples():
    s, _ = named_point("q2")
    r = 1 / math.sqrt(2)
    t = t_vector(s, PureState(np.array([0, r, -r, 0])))
    scaled = t.table() * 8 / math.sqrt(3)
    assert np.allclose(np.abs(scaled[:, 2:]), 1, atol=1e-12)
    assert np.allclose(scaled[2:], np.array([[-1, 1, -1, 1], [1, -1, 1, -1]]), atol=1e-12)
    s, _ = named_point("q")
    t = t_vector(s, PureState(np.array([1, 0, 0, 0])))
    vals = np.unique(np.round(np.abs(t.vector()), 4))
    assert 0.2282 in vals and 0.4196 in vals
    with pytest.raises(ValueError):
        t_vector(s, s.state)


@given(st.integers(0, 2 ** 32 - 1))
def test_t_vector_block_sums_vanish(seed):
    rng = np.random.default_rng(seed)
    s = random_qubit_strategy(rng, real=True)
    # any vector orthogonal to the state
    v = rng.normal(size=4)
    psi = s.state.amplitudes
    v = v - np.vdot(psi, v) * psi
    t = t_vector(s, PureState.normalized(v))
    assert np.abs(t.block_sums()).max() <= 1e-10


def test_primal_without_constraints_is_unbounded_or_large():
    out = nonexposed_primal(pr_box(0, 0, 1), [])
    assert out.status == LpStatus.UNBOUNDED or out.value > 1


def test_two_sided_chsh_bound_for_pr():
    # with |B.P_d| <= 1 the best functional is CHSH/2, worth 2 on the PR box
    from bellscope.simplex import LinearProgram, solve_lp
    D = deterministic_matrix()
    out = solve_lp(LinearProgram(pr_box(0, 0, 1).vector(), A_ub=np.vstack([D.T, -D.T]),
                                 b_ub=np.ones(32), bounds=[(None, None)] * 16, maximize=True))
    assert out.value == pytest.approx(2, abs=1e-9)


@pytest.mark.parametrize("name", CERTIFIABLE)
def test_certificates(name):
    cert = certify_nonexposed(name)
    assert cert.certified, name
    assert cert.residual < 1e-9
    assert cert.dual_value == pytest.approx(1, abs=1e-8)
    assert cert.primal_value == pytest.approx(1, abs=1e-8)
    assert len(cert.saturating) >= 1
    assert cert.y.min() >= -1e-12
    # weak duality
    assert cert.primal_value <= cert.dual_value + 1e-8
    for t in cert.t_vectors:
        assert np.abs(t.block_sums()).max() <= 1e-10
    assert cert.derived == (name == "hardy")
    assert set(cert.to_json()) >= {"point", "t_vectors", "y", "z", "primal_value",
                                   "dual_value", "residual"}


def test_q2_certificate_values():
    cert = certify_nonexposed("q2")
    assert {j for j in range(16) if cert.y[j] > 0} == {3, 6, 9, 12}
    assert cert.y[[3, 6, 9, 12]] == pytest.approx([0.25] * 4)
    assert cert.z[0] == pytest.approx(1 / math.sqrt(3))
    assert {3, 6, 9, 12} <= set(cert.saturating)


def test_q3_and_q4_certificate_values():
    cert = certify_nonexposed("q3")
    assert cert.y[[2, 3, 12, 15]] == pytest.approx([0.25] * 4)
    assert cert.z == pytest.approx([1 / math.sqrt(6)] * 2)
    cert = certify_nonexposed("q4")
    z1 = cert.y[3]
    assert z1 == pytest.approx(0.4450, abs=1e-4)
    assert cert.z[0] ** 2 == pytest.approx(0.7530, abs=1e-4)
    assert cert.z[1] ** 2 == pytest.approx(0.0677, abs=1e-4)


def test_hardy_certificate_is_derived():
    cert = certify_nonexposed("hardy")
    assert cert.derived and cert.certified
    dual = nonexposed_dual_lp(named_point("hardy")[1], cert.t_vectors)
    assert dual.value == pytest.approx(1, abs=1e-9)


def test_all_zero_dual_is_infeasible():
    s, c = named_point("q2")
    r = 1 / math.sqrt(2)
    ts = [t_vector(s, PureState(np.array([0, r, -r, 0])))]
    chk = nonexposed_dual_check(c, ts, np.zeros(16), [0.0])
    assert not chk.feasible and chk.value == 0
    with pytest.raises(ValueError):
        nonexposed_dual_check(c, ts, np.zeros(15), [0.0])


def test_uniform_point_only_needs_local_weights():
    # an interior local point: dual value 1 with no T vectors and every vertex saturating
    dual = nonexposed_dual_lp(uniform(), [])
    assert dual.value == pytest.approx(1, abs=1e-9)
    assert saturating_points(np.full(16, 0.25)) == list(range(16))


def test_unknown_certificate():
    with pytest.raises(KeyError):
        certify_nonexposed("pr")
