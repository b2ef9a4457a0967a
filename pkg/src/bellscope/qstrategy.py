"""Quantum strategies: pure bipartite states with two binary measurements per party.

Measurements are stored as POVMs ``(M_0, M_1)``; a dichotomic observable ``O``
corresponds to ``((1 + O)/2, (1 - O)/2)``.  Amplitudes are ordered so that
index ``i * d_B + j`` is ``|i>_A |j>_B``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .corrgeom import Correlation

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

NORM_TOL = 1e-12
POVM_TOL = 1e-10


def xz_observable(cz: float, cx: float) -> np.ndarray:
    return cz * SZ + cx * SX


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, int] = (2, 2)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        dims = (int(self.dims[0]), int(self.dims[1]))
        if amps.size != dims[0] * dims[1]:
            raise ValueError(f"{amps.size} amplitudes do not fit dims {dims}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} differs from 1")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amps, dims=(2, 2)) -> "PureState":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps), dims)

    def matrix(self) -> np.ndarray:
        """Amplitudes as a d_A x d_B matrix."""
        return self.amplitudes.reshape(self.dims)

    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.matrix(), compute_uv=False)

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def phi_plus(d: int = 2) -> PureState:
    amps = np.zeros(d * d, dtype=complex)
    amps[:: d + 1] = 1 / math.sqrt(d)
    return PureState(amps, (d, d))


def _check_psd_leq_identity(m: np.ndarray, what: str):
    if not np.allclose(m, m.conj().T, atol=POVM_TOL):
        raise ValueError(f"{what} is not Hermitian")
    w = np.linalg.eigvalsh(m)
    if w.min() < -1e-12 or w.max() > 1 + 1e-12:
        raise ValueError(f"{what} has eigenvalues outside [0, 1]")


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple

    def __post_init__(self):
        els = tuple(np.array(e, dtype=complex) for e in self.elements)
        if len(els) != 2:
            raise ValueError("binary measurements need exactly two elements")
        d = els[0].shape[0]
        for k, e in enumerate(els):
            if e.shape != (d, d):
                raise ValueError("POVM elements must be square and equal-sized")
            if not np.allclose(e, e.conj().T, atol=POVM_TOL):
                raise ValueError(f"POVM element {k} is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -1e-12:
                raise ValueError(f"POVM element {k} is not positive semidefinite")
            e.setflags(write=False)
        if not np.allclose(els[0] + els[1], np.eye(d), atol=POVM_TOL):
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", els)

    @classmethod
    def from_observable(cls, obs) -> "Povm":
        o = np.asarray(obs, dtype=complex)
        if not np.allclose(o, o.conj().T, atol=POVM_TOL):
            raise ValueError("observable is not Hermitian")
        if not np.allclose(o @ o, np.eye(o.shape[0]), atol=POVM_TOL):
            raise ValueError("observable does not square to the identity")
        eye = np.eye(o.shape[0])
        return cls(((eye + o) / 2, (eye - o) / 2))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def observable(self) -> np.ndarray:
        return self.elements[0] - self.elements[1]

    def is_projective(self, tol: float = 1e-9) -> bool:
        return all(np.allclose(e @ e, e, atol=tol) for e in self.elements)

    def __getitem__(self, a: int) -> np.ndarray:
        return self.elements[a]


@dataclass(frozen=True, eq=False)
class Strategy:
    state: PureState
    measA: tuple
    measB: tuple

    def __post_init__(self):
        ma = tuple(m if isinstance(m, Povm) else Povm.from_observable(m) for m in self.measA)
        mb = tuple(m if isinstance(m, Povm) else Povm.from_observable(m) for m in self.measB)
        if len(ma) != 2 or len(mb) != 2:
            raise ValueError("each party needs exactly two measurements")
        da, db = self.state.dims
        if any(m.dim != da for m in ma) or any(m.dim != db for m in mb):
            raise ValueError("measurement dimension does not match the state")
        object.__setattr__(self, "measA", ma)
        object.__setattr__(self, "measB", mb)

    @classmethod
    def from_observables(cls, state: PureState, obsA, obsB) -> "Strategy":
        return cls(state, tuple(Povm.from_observable(o) for o in obsA),
                   tuple(Povm.from_observable(o) for o in obsB))

    def observables(self) -> tuple[list[np.ndarray], list[np.ndarray]]:
        return [m.observable() for m in self.measA], [m.observable() for m in self.measB]

    def is_projective(self, tol: float = 1e-9) -> bool:
        return all(m.is_projective(tol) for m in self.measA + self.measB)

    def stacks(self) -> tuple[np.ndarray, np.ndarray]:
        """Element arrays indexed [setting, outcome, i, j]."""
        ea = np.array([[m[a] for a in range(2)] for m in self.measA])
        eb = np.array([[m[b] for b in range(2)] for m in self.measB])
        return ea, eb

    def transformed(self, uA: np.ndarray, uB: np.ndarray) -> "Strategy":
        """Apply local unitaries to the state and conjugate all elements."""
        psi = uA @ self.state.matrix() @ uB.T
        conj = lambda u, m: Povm(tuple(u @ e @ u.conj().T for e in m.elements))
        return Strategy(PureState(psi.reshape(-1), self.state.dims),
                        tuple(conj(uA, m) for m in self.measA),
                        tuple(conj(uB, m) for m in self.measB))


@dataclass(frozen=True)
class StrategyParams:
    theta: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    phi: float = 0.0
    gamma_A: float = 0.0
    gamma_B: float = 0.0
    omega_A: float = 0.0
    omega_B: float = 0.0

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if not math.isfinite(v):
                raise ValueError(f"parameter {k} is not finite")


# ---------------------------------------------------------------- Born rule


def born(s: Strategy) -> Correlation:
    psi = s.state.matrix()
    ea, eb = s.stacks()
    left = np.einsum("xaik,kl->xail", ea, psi)
    p = np.einsum("ij,xail,ybjl->abxy", psi.conj(), left, eb)
    return Correlation(p.real)


def born_batch(psi: np.ndarray, ea: np.ndarray, eb: np.ndarray) -> np.ndarray:
    """Vectorised Born rule.

    psi: (N, dA, dB); ea: (N, 2, 2, dA, dA) indexed [n, x, a]; eb likewise.
    Returns real probabilities of shape (N, 2, 2, 2, 2) indexed [n, a, b, x, y].
    """
    left = np.einsum("nxaik,nkl->nxail", ea, psi)
    p = np.einsum("nij,nxail,nybjl->nabxy", psi.conj(), left, eb, optimize=True)
    return p.real


def born_mes(d: int, measA: Sequence[Povm], measB: Sequence[Povm]) -> Correlation:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if any(m.dim != d for m in list(measA) + list(measB)):
        raise ValueError("measurement dimension does not match d")
    ea = np.array([[m[a] for a in range(2)] for m in measA])
    eb = np.array([[m[b] for b in range(2)] for m in measB])
    # tr(E^T F) = sum_ij E_ij F_ij
    p = np.einsum("xaij,ybij->abxy", ea, eb) / d
    return Correlation(p.real)


# ---------------------------------------------------------------- entanglement


def entanglement_of_formation(psi: PureState) -> float:
    lam = psi.schmidt_coefficients() ** 2
    lam = lam[lam > 1e-300]
    return float(max(0.0, -(lam * np.log2(lam)).sum()))


# ---------------------------------------------------------------- equivalence


class _PhaseGraph:
    """Unknown phases related by difference constraints x_j - x_i = w (mod 2pi)."""

    def __init__(self, n: int):
        self.adj = [[] for _ in range(n)]

    def add(self, i: int, j: int, w: float):
        self.adj[i].append((j, w))
        self.adj[j].append((i, -w))

    def solve(self) -> np.ndarray:
        x = np.full(len(self.adj), np.nan)
        for root in range(len(self.adj)):
            if not np.isnan(x[root]):
                continue
            x[root] = 0.0
            stack = [root]
            while stack:
                i = stack.pop()
                for j, w in self.adj[i]:
                    if np.isnan(x[j]):
                        x[j] = x[i] + w
                        stack.append(j)
        return x


def _phase_edges(graph, offset_i, offset_j, m1, m2, tol):
    d = m1.shape[0]
    for k in range(d):
        for l in range(k + 1, d):
            if abs(m1[k, l]) > tol and abs(m2[k, l]) > tol:
                # m2_kl = m1_kl e^{i(x_k - x_l)}
                graph.add(offset_j + l, offset_i + k, float(np.angle(m2[k, l] / m1[k, l])))


def _su(u: np.ndarray) -> np.ndarray:
    d = u.shape[0]
    det = np.linalg.det(u)
    return u * np.exp(-1j * np.angle(det) / d)


def _equivalence_holds(s1: Strategy, s2: Strategy, uA, uB, tol) -> bool:
    t = s1.transformed(uA, uB)
    if abs(abs(t.state.overlap(s2.state)) - 1.0) > tol:
        return False
    for m_t, m_2 in zip(t.measA + t.measB, s2.measA + s2.measB):
        for a in range(2):
            if np.max(np.abs(m_t[a] - m_2[a])) > tol:
                return False
    return True


def local_unitary_equivalent(s1: Strategy, s2: Strategy, tol: float = 1e-9):
    """Local unitaries (u_A, u_B) carrying s1 onto s2, or None.

    The state is matched up to a global phase and each party's POVM elements are
    matched separately.  Both unitaries are returned with unit determinant.
    """
    if s1.state.dims != s2.state.dims or s1.state.dims[0] != s1.state.dims[1]:
        raise ValueError("strategies must share equal local dimensions")
    if not (s1.is_projective() and s2.is_projective()):
        raise ValueError("equivalence test needs projective measurements")
    d = s1.state.dims[0]
    U1, S1, W1 = np.linalg.svd(s1.state.matrix())
    U2, S2, W2 = np.linalg.svd(s2.state.matrix())
    if np.max(np.abs(S1 - S2)) > tol:
        return None
    # In Schmidt coordinates u_A = U2 X U1^dag and u_B = W2^T Z^T conj(W1),
    # subject to X S Z = S.
    hatA1 = [U1.conj().T @ m[a] @ U1 for m in s1.measA for a in range(2)]
    hatA2 = [U2.conj().T @ m[a] @ U2 for m in s2.measA for a in range(2)]
    hatB1 = [W1.conj() @ m[a] @ W1.T for m in s1.measB for a in range(2)]
    hatB2 = [W2.conj() @ m[a] @ W2.T for m in s2.measB for a in range(2)]
    gaps = np.abs(np.diff(S1))
    support = S1 > tol
    distinct = np.all(gaps[support[1:]] > tol) if d > 1 else True

    if distinct and np.count_nonzero(~support) <= 1:
        # X = diag(e^{i a_k}), Z = diag(e^{i b_k}), with b_k = -a_k on the support
        g = _PhaseGraph(2 * d)  # nodes: a_k, then e_k = -b_k
        for m1, m2 in zip(hatA1, hatA2):
            _phase_edges(g, 0, 0, m1, m2, tol)
        for m1, m2 in zip(hatB1, hatB2):
            # m2_kl = e^{i(b_k - b_l)} m1_kl = e^{i(e_l - e_k)} m1_kl
            _phase_edges(g, d, d, m1.conj(), m2.conj(), tol)
        for k in np.flatnonzero(support):
            g.add(k, d + k, 0.0)
        x = g.solve()
        X = np.diag(np.exp(1j * x[:d]))
        Z = np.diag(np.exp(-1j * x[d:]))
    elif np.all(np.abs(S1 - S1[0]) <= tol):
        # maximally entangled: Z = X^dag and every element transforms as
        # X m X^dag, Bob's after complex conjugation.  Fix X by a generic
        # Hermitian combination, then the residual diagonal phases.
        ops1 = hatA1 + [m.conj() for m in hatB1]
        ops2 = hatA2 + [m.conj() for m in hatB2]
        rng = np.random.default_rng(12345)
        coef = rng.normal(size=len(ops1))
        h1 = sum(c * m for c, m in zip(coef, ops1))
        h2 = sum(c * m for c, m in zip(coef, ops2))
        w1, v1 = np.linalg.eigh(h1)
        w2, v2 = np.linalg.eigh(h2)
        if np.max(np.abs(w1 - w2)) > math.sqrt(tol):
            return None
        g = _PhaseGraph(d)
        for m1, m2 in zip(ops1, ops2):
            _phase_edges(g, 0, 0, v1.conj().T @ m1 @ v1, v2.conj().T @ m2 @ v2, tol)
        x = g.solve()
        X = v2 @ np.diag(np.exp(1j * x)) @ v1.conj().T
        Z = X.conj().T
    else:
        raise NotImplementedError("partially degenerate Schmidt spectra are not supported")
    uA = U2 @ X @ U1.conj().T
    uB = W2.T @ Z.T @ W1.conj()
    uA, uB = _su(uA), _su(uB)
    if not _equivalence_holds(s1, s2, uA, uB, math.sqrt(tol) if tol < 1e-6 else tol):
        return None
    return uA, uB


# ---------------------------------------------------------------- Jordan blocks


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    basis: np.ndarray
    blocks: tuple
    p_blocks: tuple
    q_blocks: tuple

    def offsets(self) -> list[int]:
        return list(np.cumsum((0,) + tuple(self.blocks))[:-1])


def _check_projector(p: np.ndarray, what: str, tol: float = 1e-9):
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"{what} is not square")
    if not np.allclose(p, p.conj().T, atol=tol):
        raise ValueError(f"{what} is not Hermitian")
    if not np.allclose(p @ p, p, atol=tol):
        raise ValueError(f"{what} is not idempotent")


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    order = np.argsort(values)
    groups = [[order[0]]]
    for i in order[1:]:
        if values[i] - values[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def jordan_blocks(P, Q, tol: float = 1e-8) -> BlockDecomposition:
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    _check_projector(P, "P")
    _check_projector(Q, "Q")
    if P.shape != Q.shape:
        raise ValueError("projectors differ in dimension")
    d = P.shape[0]
    lam, vecs = np.linalg.eigh(P + Q)
    # eigenvalues 1 +- c pair up into spaces invariant under both projectors
    dist = np.abs(lam - 1.0)
    columns, sizes = [], []
    for group in _cluster(dist, tol):
        V = vecs[:, group]
        c = float(np.mean(dist[group]))
        if c <= tol or c >= 1 - tol:
            w, r = np.linalg.eigh(V.conj().T @ P @ V)
            for k in range(len(group)):
                columns.append(V @ r[:, k])
                sizes.append(1)
            continue
        w, r = np.linalg.eigh(V.conj().T @ P @ V)
        rng_vecs = V @ r[:, w > 0.5]
        if 2 * rng_vecs.shape[1] != len(group):
            raise RuntimeError("unbalanced invariant subspace in Jordan decomposition")
        for k in range(rng_vecs.shape[1]):
            u1 = rng_vecs[:, k]
            w2 = Q @ u1 - P @ (Q @ u1)
            columns.extend([u1, w2 / np.linalg.norm(w2)])
            sizes.append(2)
    basis = np.column_stack(columns)
    if not np.allclose(basis.conj().T @ basis, np.eye(d), atol=1e-9):
        raise RuntimeError("Jordan basis is not orthonormal")
    pb, qb = basis.conj().T @ P @ basis, basis.conj().T @ Q @ basis
    offs = np.cumsum([0] + sizes)
    mask = np.zeros((d, d), dtype=bool)
    p_blocks, q_blocks = [], []
    for k, n in enumerate(sizes):
        s = slice(offs[k], offs[k] + n)
        mask[s, s] = True
        p_blocks.append(pb[s, s].copy())
        q_blocks.append(qb[s, s].copy())
    if max(np.abs(pb[~mask]).max(initial=0), np.abs(qb[~mask]).max(initial=0)) > 1e-9:
        raise RuntimeError("projectors are not block diagonal in the constructed basis")
    return BlockDecomposition(basis, tuple(sizes), tuple(p_blocks), tuple(q_blocks))


# ---------------------------------------------------------------- SWAP circuit


def reference_angles(obs0: np.ndarray, obs1: np.ndarray, tol: float = 1e-9) -> tuple[float, float]:
    """Angles t with O = cos(t) sx + sin(t) sz for a pair of real qubit observables."""
    out = []
    for o in (obs0, obs1):
        o = np.asarray(o, dtype=complex)
        if o.shape != (2, 2):
            raise ValueError("reference observables must be qubit operators")
        c0 = np.trace(o).real / 2
        cz = (o[0, 0] - o[1, 1]).real / 2
        cx, cy = o[0, 1].real, -o[0, 1].imag
        if abs(c0) > tol or abs(cy) > tol or abs(cx * cx + cz * cz - 1) > tol:
            raise ValueError("reference observable is not a real x-z plane reflection")
        out.append(math.atan2(cz, cx))
    if abs(math.sin(out[0] - out[1])) <= 1e-9:
        raise ValueError("reference observables are parallel; the swap is singular")
    return out[0], out[1]


def swap_coefficients(t0: float, t1: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """(x0, x1), (z0, z1) with sigma_x ~ x0 O0 + x1 O1 and sigma_z ~ z0 O0 + z1 O1."""
    den = math.sin(t0) * math.cos(t1) - math.cos(t0) * math.sin(t1)
    return (-math.sin(t1) / den, math.sin(t0) / den), (math.cos(t1) / den, -math.cos(t0) / den)


def swap_kraus(o0: np.ndarray, o1: np.ndarray, t0: float, t1: float) -> list[np.ndarray]:
    """Operators K_k = <k|_anc Phi |0>_anc of the local swap circuit."""
    (x0, x1), (z0, z1) = swap_coefficients(t0, t1)
    sx = x0 * o0 + x1 * o1
    sz = z0 * o0 + z1 * o1
    eye = np.eye(o0.shape[0])
    return [(eye + sz) / 2, sx @ (eye - sz) / 2]


def swap_isometry_check(s: Strategy, ref: Strategy) -> float:
    if ref.state.dims != (2, 2):
        raise ValueError("reference must be a two-qubit strategy")
    ra, rb = ref.observables()
    ta, tb = reference_angles(*ra), reference_angles(*rb)
    oa, ob = s.observables()
    ka = swap_kraus(oa[0], oa[1], *ta)
    kb = swap_kraus(ob[0], ob[1], *tb)
    psi = s.state.matrix()
    target = ref.state.matrix()
    out = np.zeros(psi.shape, dtype=complex)
    for i in range(2):
        for j in range(2):
            out += target[i, j].conjugate() * (ka[i] @ psi @ kb[j].T)
    return float(np.sum(np.abs(out) ** 2))


# ------------------------------------------------------- commuting effects


def lemma3_check(E, F, tol: float = 1e-9) -> Optional[bool]:
    """For 0 <= E, F <= 1 with tr(E^T F)/d <= tol, E^T and F commute.

    Returns None when the trace condition does not hold (no claim), otherwise
    whether the pair commutes within the bound implied by the trace.
    """
    E = np.asarray(E, dtype=complex)
    F = np.asarray(F, dtype=complex)
    if E.shape != F.shape or E.shape[0] != E.shape[1]:
        raise ValueError("operators must be square and of equal size")
    _check_psd_leq_identity(E, "E")
    _check_psd_leq_identity(F, "F")
    d = E.shape[0]
    v = float(np.trace(E.T @ F).real) / d
    if v > tol:
        return None
    G = E.T
    comm = np.linalg.norm(G @ F - F @ G)
    # ||GF||_F^2 <= tr(GF) for 0 <= G, F <= 1
    bound = 2 * math.sqrt(d * max(v, 0.0)) + 1e-12
    assert comm <= bound, f"commutator {comm} exceeds the trace bound {bound}"
    return bool(comm <= 2 * math.sqrt(d * tol) + 1e-12)


# ---------------------------------------------------------------- JSON


def _mat_json(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def _mat_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def strategy_to_json(s: Strategy) -> dict:
    return {
        "state": {"dims": list(s.state.dims),
                  "amps": [[float(v.real), float(v.imag)] for v in s.state.amplitudes]},
        "measA": [[_mat_json(e) for e in m.elements] for m in s.measA],
        "measB": [[_mat_json(e) for e in m.elements] for m in s.measB],
    }


def strategy_from_json(obj) -> Strategy:
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if "named" in obj:
        from .catalog import named_point

        s, _ = named_point(obj["named"])
        if s is None:
            raise ValueError(f"named point {obj['named']!r} has no quantum strategy")
        return s
    st = obj["state"]
    amps = np.array([complex(re, im) for re, im in st["amps"]])
    state = PureState(amps, tuple(st["dims"]))
    measA = tuple(Povm(tuple(_mat_from_json(e) for e in m)) for m in obj["measA"])
    measB = tuple(Povm(tuple(_mat_from_json(e) for e in m)) for m in obj["measB"])
    return Strategy(state, measA, measB)
