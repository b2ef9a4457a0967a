"""Moment-matrix outer approximations of the quantum set and SWAP-method robustness bounds.

Operators are two dichotomic observables per party.  A relaxation at level L
indexes its moment matrix by products u_A x u_B with |u_A|, |u_B| <= L, so it
has (2L+1)^2 rows.  Moments are modelled as real numbers: a moment and its
adjoint share one variable, which is exact for real strategies and, for
complex ones, holds for the real part of the moment matrix (still PSD).
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import nc
from .corrgeom import CHSH, BellFunctional, ZeroPattern, zero_pattern
from .qstrategy import Strategy, reference_angles, swap_coefficients
from .sdp import ConeProgram, SdpStatus, solve_cone, smat

MAX_LEVEL = 3


@dataclass(frozen=True)
class Word:
    party: str
    letters: tuple

    def __post_init__(self):
        if self.party not in ("A", "B"):
            raise ValueError("party must be 'A' or 'B'")
        object.__setattr__(self, "letters", nc.reduce_word(tuple(self.letters)))

    def __len__(self):
        return len(self.letters)

    def adjoint(self) -> "Word":
        return Word(self.party, nc.adjoint(self.letters))


@dataclass(frozen=True, order=True)
class MomentIndex:
    """<wordA x wordB>, stored in the canonical orientation of the adjoint pair."""

    a: tuple
    b: tuple

    @classmethod
    def of(cls, wa, wb) -> "MomentIndex":
        return cls(*nc.pair_key(tuple(wa), tuple(wb)))

    @property
    def is_identity(self) -> bool:
        return not self.a and not self.b

    def __str__(self):
        def show(w, sym):
            return "".join(f"{sym}{l}" for l in w) or "1"
        return f"<{show(self.a, 'A')}*{show(self.b, 'B')}>"


IDENTITY = MomentIndex((), ())


@dataclass
class MomentFunctional:
    """const + sum coef[m] * <m>."""

    const: float = 0.0
    coef: dict = field(default_factory=dict)

    def add(self, m: MomentIndex, c: float) -> None:
        if m.is_identity:
            self.const += c
        else:
            self.coef[m] = self.coef.get(m, 0.0) + c

    def __add__(self, other: "MomentFunctional") -> "MomentFunctional":
        out = MomentFunctional(self.const, dict(self.coef))
        out.const += other.const
        for m, c in other.coef.items():
            out.add(m, c)
        return out

    def scaled(self, s: float) -> "MomentFunctional":
        return MomentFunctional(self.const * s, {m: c * s for m, c in self.coef.items()})

    def evaluate(self, moments: Mapping[MomentIndex, float]) -> float:
        return self.const + sum(c * moments[m] for m, c in self.coef.items())

    def max_degree(self) -> tuple[int, int]:
        return (max((len(m.a) for m in self.coef), default=0),
                max((len(m.b) for m in self.coef), default=0))

    @classmethod
    def from_polys(cls, pa: nc.Poly, pb: nc.Poly, scale: float = 1.0) -> "MomentFunctional":
        out = cls()
        for wa, ca in pa.items():
            for wb, cb in pb.items():
                if ca * cb != 0.0:
                    out.add(MomentIndex.of(wa, wb), scale * ca * cb)
        return out


def probability_functional(a: int, b: int, x: int, y: int) -> MomentFunctional:
    """p(a,b|x,y) = (1 + (-1)^a <A_x> + (-1)^b <B_y> + (-1)^(a+b) <A_x B_y>) / 4."""
    sa, sb = (-1.0) ** a, (-1.0) ** b
    return MomentFunctional.from_polys({(): 1.0, (x,): sa}, {(): 1.0, (y,): sb}, 0.25)


def bell_functional(f: BellFunctional) -> MomentFunctional:
    out = MomentFunctional()
    coeffs = f.coefficients
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    if coeffs[a, b, x, y] != 0.0:
                        out = out + probability_functional(a, b, x, y).scaled(float(coeffs[a, b, x, y]))
    return out


@dataclass
class RelaxationConstraints:
    """Zero cells bounded by eps, an optional CHSH value and extra equalities on the correlation."""

    pattern: Optional[ZeroPattern] = None
    eps: float = 0.0
    chsh: Optional[float] = None
    equalities: tuple = ()  # (BellFunctional, value)


@dataclass
class RelaxationProblem:
    level: int
    index: list  # [(wordA, wordB)] rows of the moment matrix
    moments: list  # variables, MomentIndex
    position: dict
    F0: np.ndarray
    Fs: np.ndarray
    constraints: RelaxationConstraints
    objective: MomentFunctional
    maximize: bool = True

    @property
    def size(self) -> int:
        return len(self.index)

    def linear(self, f: MomentFunctional) -> tuple[float, np.ndarray]:
        v = np.zeros(len(self.moments))
        for m, c in f.coef.items():
            if m not in self.position:
                raise ValueError(f"moment {m} is not available at this relaxation level")
            v[self.position[m]] += c
        return f.const, v

    def moment_matrix(self, y: np.ndarray) -> np.ndarray:
        return self.F0 + np.tensordot(y, self.Fs, axes=1)

    def moment_dict(self, y: np.ndarray) -> dict:
        out = {m: float(v) for m, v in zip(self.moments, y)}
        out[IDENTITY] = 1.0
        return out

    def exact_moments(self, s: Strategy) -> np.ndarray:
        return np.array([exact_moment(s, m) for m in self.moments])

    def with_objective(self, f: MomentFunctional, maximize: bool) -> "RelaxationProblem":
        return replace(self, objective=f, maximize=maximize)

    def with_constraints(self, c: RelaxationConstraints) -> "RelaxationProblem":
        return replace(self, constraints=c)


def _word_product(ws: Sequence[np.ndarray], w: tuple, dim: int) -> np.ndarray:
    out = np.eye(dim, dtype=complex)
    for letter in w:
        out = out @ ws[letter]
    return out


def exact_moment(s: Strategy, m: MomentIndex) -> float:
    """Re <psi| W_A x W_B |psi> for the observables of a strategy."""
    oa, ob = s.observables()
    psi = s.state.matrix()
    da, db = psi.shape
    wa = _word_product(oa, m.a, da)
    wb = _word_product(ob, m.b, db)
    return float(np.real(np.trace(psi.conj().T @ wa @ psi @ wb.T)))


def build_relaxation(level: int, constraints: Optional[RelaxationConstraints] = None,
                     objective: Optional[MomentFunctional] = None, maximize: bool = True,
                     extra: Iterable[tuple] = ()) -> RelaxationProblem:
    """Moment matrix over u_A x u_B with word lengths <= level, plus optional extra index pairs."""
    if not isinstance(level, int) or not 1 <= level <= MAX_LEVEL:
        raise ValueError(f"unsupported relaxation level {level!r}; use 1..{MAX_LEVEL}")
    words = nc.words_up_to(level)
    index = [(wa, wb) for wa in words for wb in words]
    for wa, wb in extra:
        pair = (nc.reduce_word(tuple(wa)), nc.reduce_word(tuple(wb)))
        if pair not in index:
            index.append(pair)
    k = len(index)
    keys = [[MomentIndex.of(nc.adjoint(ua) + va, nc.adjoint(ub) + vb) for (va, vb) in index]
            for (ua, ub) in index]
    moments = sorted({m for row in keys for m in row if not m.is_identity})
    position = {m: i for i, m in enumerate(moments)}
    F0 = np.zeros((k, k))
    Fs = np.zeros((len(moments), k, k))
    for i in range(k):
        for j in range(k):
            m = keys[i][j]
            if m.is_identity:
                F0[i, j] = 1.0
            else:
                Fs[position[m], i, j] = 1.0
    return RelaxationProblem(level, index, moments, position, F0, Fs,
                             constraints or RelaxationConstraints(),
                             objective if objective is not None else bell_functional(CHSH), maximize)


@dataclass
class SdpSolution:
    status: SdpStatus
    value: float
    moments: Optional[np.ndarray]
    primal_matrix: Optional[np.ndarray]
    dual_matrix: Optional[np.ndarray]
    gap: float
    iterations: int

    @property
    def converged(self) -> bool:
        return self.status is SdpStatus.CONVERGED


def _kernel_vectors(prob: RelaxationProblem, cells) -> np.ndarray:
    """Index-space vectors forced into ker M when the cells vanish exactly.

    If <P_a|x Q_b|y> = 0 then (w_A P_a|x) x (w_B Q_b|y) |psi> = 0 for all words
    w_A, w_B, and the relaxation sees the same vanishing quadratic form whenever
    both halves of each product are indexed.
    """
    where = {pair: i for i, pair in enumerate(prob.index)}
    vecs = []
    for a, b, x, y in cells:
        for wa, wb in prob.index:
            wa2, wb2 = nc.reduce_word(wa + (x,)), nc.reduce_word(wb + (y,))
            terms = [((wa, wb), 1.0), ((wa2, wb), (-1.0) ** a), ((wa, wb2), (-1.0) ** b),
                     ((wa2, wb2), (-1.0) ** (a + b))]
            if all(pair in where for pair, _ in terms):
                v = np.zeros(prob.size)
                for pair, c in terms:
                    v[where[pair]] += 0.25 * c
                vecs.append(v)
    return np.array(vecs).reshape(-1, prob.size)


def _independent_rows(A: np.ndarray, b: np.ndarray, tol: float = 1e-10):
    if A.shape[0] == 0:
        return A, b
    U, sv, Vt = np.linalg.svd(np.hstack([A, b[:, None]]), full_matrices=False)
    r = int(np.sum(sv > tol * max(1.0, sv[0])))
    # rows of U^T [A b] span the same affine constraints
    Ab = (U[:, :r].T @ np.hstack([A, b[:, None]]))
    return Ab[:, :-1], Ab[:, -1]


def _zero_cells(con: RelaxationConstraints) -> list:
    """Cells forced to vanish exactly: pattern cells at eps = 0 and the support of any
    nonnegative equality functional fixed at 0."""
    cells = set()
    if con.pattern is not None and con.eps == 0.0:
        cells |= set(con.pattern.cells)
    for f, val in con.equalities:
        coeffs = f.coefficients
        if val == 0.0 and np.all(coeffs >= 0) and np.any(coeffs > 0):
            cells |= {tuple(int(i) for i in c) for c in np.argwhere(coeffs > 0)}
    return sorted(cells)


def _cone_program(prob: RelaxationProblem, face: Optional[np.ndarray] = None):
    """Cone program for prob; face holds extra index-space vectors known to lie in ker M.

    Returns (program, objective constant, objective sign, Q) where the PSD block is
    Q^T M Q.  With a face given the CHSH equality is dropped (it is implied).
    """
    n = len(prob.moments)
    con = prob.constraints
    const, obj = prob.linear(prob.objective)
    sign = -1.0 if prob.maximize else 1.0
    g_rows, h_rows = [], []
    a_rows, b_rows = [], []
    zero = _zero_cells(con)
    if con.pattern is not None and con.eps != 0.0:
        for cell in sorted(con.pattern.cells):
            c0, v = prob.linear(probability_functional(*cell))
            g_rows.append(v)
            h_rows.append(con.eps - c0)
    F0, Fs = prob.F0, prob.Fs
    Q = np.eye(prob.size)
    V = _kernel_vectors(prob, zero) if zero else np.zeros((0, prob.size))
    if face is not None:
        V = np.vstack([V, face])
    if V.shape[0]:
        # M(y) V = 0, then M restricted to the orthogonal complement of span V
        a_rows.extend((Fs @ V.T).reshape(n, -1).T)
        b_rows.extend(-(F0 @ V.T).reshape(-1))
        U, sv, _ = np.linalg.svd(V.T, full_matrices=True)
        rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0])))
        Q = U[:, rank:]
        F0 = Q.T @ F0 @ Q
        Fs = np.einsum("ki,nkl,lj->nij", Q, Fs, Q)
    eqs = list(con.equalities)
    if con.chsh is not None and face is None:
        eqs.append((CHSH, con.chsh))
    for f, val in eqs:
        c0, v = prob.linear(bell_functional(f))
        a_rows.append(v)
        b_rows.append(val - c0)
    lin = (np.array(g_rows).reshape(-1, n), np.array(h_rows)) if g_rows else None
    eq = None
    if a_rows:
        eq = _independent_rows(np.array(a_rows).reshape(-1, n), np.array(b_rows),
                               tol=1e-10 if face is None else 1e-6)
    cp = ConeProgram.build(sign * obj, lin=lin, psd=[(F0, Fs)], eq=eq)
    return cp, const, sign, Q


FACE_TOL = 1e-6


def _solve_program(prob: RelaxationProblem, max_iter: int, face=None) -> SdpSolution:
    cp, const, sign, Q = _cone_program(prob, face)
    sol = solve_cone(cp, max_iter=max_iter)
    if sol.status in (SdpStatus.INFEASIBLE, SdpStatus.UNBOUNDED):
        return SdpSolution(sol.status, float("nan"), None, None, None, float("nan"), sol.iterations)
    value = const + sign * sol.primal_value
    M = prob.moment_matrix(sol.x)
    Z = Q @ smat(sol.z[cp.n_lin:], cp.psd_dims[0]) @ Q.T
    if sol.status is not SdpStatus.CONVERGED:
        value = float("nan")
    return SdpSolution(sol.status, float(value), sol.x, M, Z, float(sol.gap), sol.iterations)


def _optimal_face(sol: SdpSolution, rel: float = 1e-6) -> np.ndarray:
    """Orthogonal complement of the range of an interior-point optimum.

    Interior-point iterates approach the relative interior of the optimal face, so
    the small eigenvectors of the optimal moment matrix span the directions every
    optimal M annihilates.
    """
    w, v = np.linalg.eigh(sol.primal_matrix)
    return v[:, w <= rel * w[-1]].T


def sdp_solve(prob: RelaxationProblem, max_iter: int = 200) -> SdpSolution:
    """Optimise the objective over the relaxation; value is nan unless the solver converged.

    A CHSH constraint sitting on the relaxed maximum leaves no interior; when the
    direct solve fails there, the problem is re-posed on the optimal face of the
    CHSH maximisation (identified from its dual certificate).
    """
    sol = _solve_program(prob, max_iter)
    con = prob.constraints
    if sol.converged or sol.status is SdpStatus.INFEASIBLE or con.chsh is None:
        return sol
    top = _solve_program(replace(prob, constraints=replace(con, chsh=None),
                                 objective=bell_functional(CHSH), maximize=True), max_iter)
    if not top.converged or con.chsh < top.value - FACE_TOL:
        return sol
    if con.chsh > top.value + FACE_TOL:
        return SdpSolution(SdpStatus.INFEASIBLE, float("nan"), None, None, None, float("nan"),
                           sol.iterations + top.iterations)
    return _solve_program(prob, max_iter, face=_optimal_face(top))


class RelaxationFailure(RuntimeError):
    def __init__(self, solution: SdpSolution, what: str):
        super().__init__(f"{what}: solver status {solution.status.value}")
        self.solution = solution


def _require(sol: SdpSolution, what: str) -> float:
    if not sol.converged:
        raise RelaxationFailure(sol, what)
    return sol.value


def max_chsh_relaxed(pattern: Optional[ZeroPattern], eps: float, level: int) -> float:
    """Upper bound on CHSH over the relaxed set with every cell of pattern at most eps."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    prob = build_relaxation(level, RelaxationConstraints(pattern=pattern, eps=eps))
    return _require(sdp_solve(prob), "max_chsh_relaxed")


# ------------------------------------------------------------- SWAP method


@dataclass(frozen=True)
class SwapReference:
    """Reference observable angles (O = cos t sx + sin t sz) and the real reference state."""

    angles_a: tuple
    angles_b: tuple
    state: np.ndarray  # 2x2 amplitude matrix

    @classmethod
    def from_strategy(cls, ref: Strategy) -> "SwapReference":
        if ref.state.dims != (2, 2):
            raise ValueError("reference must be a two-qubit strategy")
        psi = ref.state.matrix()
        if np.max(np.abs(psi.imag)) > 1e-12:
            raise ValueError("reference state must be real")
        ra, rb = ref.observables()
        return cls(reference_angles(*ra), reference_angles(*rb), psi.real.copy())


def _as_reference(ref) -> SwapReference:
    if isinstance(ref, SwapReference):
        return ref
    if isinstance(ref, str):
        from .catalog import named_strategy
        s = named_strategy(ref)
        if s is None:
            raise ValueError(f"no quantum reference for {ref!r}")
        return SwapReference.from_strategy(s)
    return SwapReference.from_strategy(ref)


def _swap_polys(angles) -> tuple[nc.Poly, nc.Poly]:
    (x0, x1), (z0, z1) = swap_coefficients(*angles)
    return {(0,): x0, (1,): x1}, {(0,): z0, (1,): z1}


def _circuit_blocks(angles) -> dict:
    """Phi_{kj} = <k|Phi|j> on the ancilla, as polynomials in the party's observables."""
    sx, sz = _swap_polys(angles)
    one = {(): 1.0}
    p_plus = nc.padd(one, sz, scale=[0.5, 0.5])
    p_minus = nc.padd(one, sz, scale=[0.5, -0.5])
    return {
        (0, 0): p_plus,
        (0, 1): nc.pmul(p_minus, sx),
        (1, 0): nc.pmul(sx, p_minus),
        (1, 1): nc.pmul(nc.pmul(sx, p_plus), sx),
    }


def expand_swap_objective(ref) -> MomentFunctional:
    """Fidelity <ref| tr_AB[Phi (rho x |00><00|) Phi^dag] |ref> as a functional of moments."""
    r = _as_reference(ref)
    ka = [_circuit_blocks(r.angles_a)[(k, 0)] for k in range(2)]
    kb = [_circuit_blocks(r.angles_b)[(k, 0)] for k in range(2)]
    c = r.state
    out = MomentFunctional()
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    w = c[i, j] * c[k, l]
                    if w == 0.0:
                        continue
                    pa = nc.pmul(nc.pdag(ka[k]), ka[i])
                    pb = nc.pmul(nc.pdag(kb[l]), kb[j])
                    out = out + MomentFunctional.from_polys(pa, pb, w)
    return out


def _eigvec(t: float, a: int) -> np.ndarray:
    """Real unit eigenvector of cos t sx + sin t sz with eigenvalue (-1)^a."""
    obs = np.array([[math.sin(t), math.cos(t)], [math.cos(t), -math.sin(t)]])
    w, v = np.linalg.eigh(obs)
    return v[:, 1 if a == 0 else 0]


def expand_meas_merit(ref, party: str = "A") -> MomentFunctional:
    """T = (1/2) sum_{a,x} P(a|x, reference eigenstate) - 1 as a functional of moments."""
    r = _as_reference(ref)
    if party not in ("A", "B"):
        raise ValueError("party must be 'A' or 'B'")
    angles = r.angles_a if party == "A" else r.angles_b
    blocks = _circuit_blocks(angles)
    out = MomentFunctional(-1.0)
    for x in range(2):
        for a in range(2):
            phi = _eigvec(angles[x], a)
            meas = {(): 0.5, (x,): 0.5 * (-1.0) ** a}
            for k in range(2):
                op = nc.padd(blocks[(k, 0)], blocks[(k, 1)], scale=[phi[0], phi[1]])
                pa = nc.pmul(nc.pmul(nc.pdag(op), meas), op)
                if party == "A":
                    out = out + MomentFunctional.from_polys(pa, {(): 1.0}, 0.5)
                else:
                    out = out + MomentFunctional.from_polys({(): 1.0}, pa, 0.5)
    return out


def _circuit_operators(obs: Sequence[np.ndarray], angles) -> dict:
    (x0, x1), (z0, z1) = swap_coefficients(*angles)
    eye = np.eye(obs[0].shape[0])
    sx = x0 * obs[0] + x1 * obs[1]
    sz = z0 * obs[0] + z1 * obs[1]
    pp, pm = (eye + sz) / 2, (eye - sz) / 2
    return {(0, 0): pp, (0, 1): pm @ sx, (1, 0): sx @ pm, (1, 1): sx @ pp @ sx}


def meas_merit_value(s: Strategy, ref, party: str = "A") -> float:
    """Measurement figure of merit computed directly from operators.

    The circuit uses O_x = 2 M_0|x - 1 built from the (possibly non-projective)
    POVMs, so no O^2 = 1 reduction is assumed.
    """
    r = _as_reference(ref)
    if party not in ("A", "B"):
        raise ValueError("party must be 'A' or 'B'")
    meas = s.measA if party == "A" else s.measB
    angles = r.angles_a if party == "A" else r.angles_b
    obs = [2 * np.asarray(m[0], dtype=complex) - np.eye(m[0].shape[0]) for m in meas]
    blocks = _circuit_operators(obs, angles)
    psi = s.state.matrix()
    rho = psi @ psi.conj().T if party == "A" else psi.T @ psi.conj()
    total = 0.0
    for x in range(2):
        for a in range(2):
            phi = _eigvec(angles[x], a)
            for k in range(2):
                op = phi[0] * blocks[(k, 0)] + phi[1] * blocks[(k, 1)]
                total += float(np.real(np.trace(op.conj().T @ meas[x][a] @ op @ rho)))
    return 0.5 * total - 1.0


def _reference_pattern(name: str) -> ZeroPattern:
    from .catalog import named_point
    _, corr = named_point(name)
    return zero_pattern(corr)


def _robust_bound(name: str, objective: MomentFunctional, s_value: float, eps: float, level: int,
                  extra=()) -> float:
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    con = RelaxationConstraints(pattern=_reference_pattern(name), eps=eps, chsh=s_value)
    prob = build_relaxation(level, con, objective, maximize=False, extra=extra)
    sol = sdp_solve(prob)
    if sol.status is SdpStatus.INFEASIBLE:
        raise RelaxationFailure(sol, f"CHSH value {s_value} is outside the relaxed set")
    return _require(sol, "robust bound")


def swap_fidelity_bound(name: str, s_value: float, eps: float, level: int = 3) -> float:
    """Lower bound on the worst-case SWAP fidelity given CHSH = s_value and zeros up to eps."""
    return _robust_bound(name, expand_swap_objective(name), s_value, eps, level)


def meas_merit_extra(level: int, party: str) -> list:
    """Extra index pairs carrying the degree-7 single-party words of the measurement merit."""
    if level >= 4:
        return []
    words = [w for w in nc.words_up_to(4) if len(w) == 4]
    return [(w, ()) for w in words] if party == "A" else [((), w) for w in words]


def meas_merit_bound(name: str, party: str, s_value: float, eps: float, level: int = 3) -> float:
    """Lower bound on the measurement figure of merit of one party."""
    return _robust_bound(name, expand_meas_merit(name, party), s_value, eps, level,
                         extra=meas_merit_extra(level, party))


# ------------------------------------------------------------- curves


@dataclass
class CurvePoint:
    h: float
    s_min: float
    s_max: float
    status_min: str
    status_max: str


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BELLSCOPE_THREADS", "1")))
    except ValueError:
        return 1


def boundary_curve(functional_h: BellFunctional, level: int, grid: Iterable[float],
                   workers: Optional[int] = None) -> list[CurvePoint]:
    """Min and max CHSH over the relaxed set on each slice functional_h(p) = h."""
    base = build_relaxation(level)
    chsh = bell_functional(CHSH)

    def point(h: float) -> CurvePoint:
        con = RelaxationConstraints(equalities=((functional_h, float(h)),))
        hi = sdp_solve(replace(base, constraints=con, objective=chsh, maximize=True))
        lo = sdp_solve(replace(base, constraints=con, objective=chsh, maximize=False))
        return CurvePoint(float(h), lo.value, hi.value, lo.status.value, hi.status.value)

    grid = list(grid)
    workers = workers or _threads()
    if workers <= 1:
        return [point(h) for h in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point, grid))


def _fmt(v: float) -> str:
    return "%.17g" % v


def write_curve_csv(points: Sequence[CurvePoint], path, level: int) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["h", "S_min", "S_max", "status_min", "status_max", "level"])
        for p in points:
            w.writerow([_fmt(p.h), _fmt(p.s_min), _fmt(p.s_max), p.status_min, p.status_max, level])


def write_robust_csv(rows: Sequence[tuple], path) -> None:
    """rows of (S, eps, bound, merit_party)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["S", "eps", "bound", "merit_party"])
        for s, eps, bound, party in rows:
            w.writerow([_fmt(s), _fmt(eps), _fmt(bound), party])
