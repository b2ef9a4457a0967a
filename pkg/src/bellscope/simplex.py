"""Dense two-phase tableau simplex for small linear programs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
COST_TOL = 1e-10


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass
class LinearProgram:
    """Optimise c.x subject to A_eq x = b_eq, A_ub x <= b_ub and per-variable bounds.

    ``bounds`` is a list of (lower, upper) pairs, None meaning unbounded on that
    side; the default is x >= 0.
    """

    objective: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    bounds: Optional[list] = None
    maximize: bool = False

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        n = self.objective.size
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "equality")
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "inequality")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if len(self.bounds) != n:
            raise ValueError("bounds length does not match the number of variables")
        for data in (self.objective, self.A_eq, self.b_eq, self.A_ub, self.b_ub):
            if not np.all(np.isfinite(data)):
                raise ValueError("linear program data must be finite")

    @property
    def n(self) -> int:
        return self.objective.size


def _rows(A, b, n, what):
    if A is None:
        if b is not None and np.size(b):
            raise ValueError(f"{what} rhs given without matrix")
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.shape[1] != n or A.shape[0] != b.size:
        raise ValueError(f"{what} block has shape {A.shape} but rhs {b.shape} and n={n}")
    return A, b


@dataclass
class LpOutcome:
    status: LpStatus
    value: float = float("nan")
    x: Optional[np.ndarray] = None
    dual_eq: Optional[np.ndarray] = None
    dual_ub: Optional[np.ndarray] = None
    farkas_eq: Optional[np.ndarray] = None
    farkas_ub: Optional[np.ndarray] = None
    iterations: int = 0
    bland_used: bool = False

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass
class _Standard:
    """min c.z s.t. A z = b, z >= 0, with x = offset + M z."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    M: np.ndarray
    offset: np.ndarray
    n_eq: int
    n_ub: int
    row_sign: np.ndarray
    const: float = 0.0


def _standardize(lp: LinearProgram) -> _Standard:
    n = lp.n
    cols = []  # each column of M
    offset = np.zeros(n)
    bound_rows = []  # (column index into z, width)
    for i, (lo, hi) in enumerate(lp.bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if lo > hi:
            raise ValueError(f"variable {i} has empty bounds")
        e = np.zeros(n)
        e[i] = 1.0
        if np.isfinite(lo):
            offset[i] = lo
            cols.append(e)
            if np.isfinite(hi):
                bound_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[i] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    M = np.column_stack(cols) if cols else np.zeros((n, 0))
    nz = M.shape[1]
    sign = -1.0 if lp.maximize else 1.0
    c = sign * (lp.objective @ M)
    const = sign * float(lp.objective @ offset)
    n_eq, n_ub, n_bd = lp.A_eq.shape[0], lp.A_ub.shape[0], len(bound_rows)
    n_slack = n_ub + n_bd
    m = n_eq + n_slack
    A = np.zeros((m, nz + n_slack))
    b = np.zeros(m)
    A[:n_eq, :nz] = lp.A_eq @ M
    b[:n_eq] = lp.b_eq - lp.A_eq @ offset
    A[n_eq:n_eq + n_ub, :nz] = lp.A_ub @ M
    b[n_eq:n_eq + n_ub] = lp.b_ub - lp.A_ub @ offset
    for k, (j, width) in enumerate(bound_rows):
        A[n_eq + n_ub + k, j] = 1.0
        b[n_eq + n_ub + k] = width
    A[n_eq:, nz:] = np.eye(n_slack)
    c = np.concatenate([c, np.zeros(n_slack)])
    row_sign = np.where(b < 0, -1.0, 1.0)
    A *= row_sign[:, None]
    b *= row_sign
    M = np.hstack([M, np.zeros((n, n_slack))])
    return _Standard(c, A, b, M, offset, n_eq, n_ub, row_sign, const)


class _Tableau:
    def __init__(self, A, b, basis):
        self.T = np.hstack([A, b[:, None]]).astype(float)
        self.basis = list(basis)
        self.iterations = 0
        self.bland_used = False

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j
        self.iterations += 1

    def reduced_costs(self, c):
        cb = c[self.basis]
        return c - cb @ self.T[:, :-1]

    def run(self, c, allowed, max_iter=50_000):
        """Minimise c over the current basis; returns 'optimal' or ('unbounded', j)."""
        ncol = self.T.shape[1] - 1
        degenerate = 0
        bland = False
        limit = 10 * ncol
        for _ in range(max_iter):
            d = self.reduced_costs(c)
            d[~allowed] = 0.0
            d[self.basis] = 0.0
            cand = np.flatnonzero(d < -COST_TOL)
            if cand.size == 0:
                return "optimal", None
            j = int(cand[0]) if bland else int(cand[np.argmin(d[cand])])
            col = self.T[:, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return "unbounded", j
            ratios = self.T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            if best <= FEAS_TOL:
                degenerate += 1
                if degenerate > limit and not bland:
                    bland = True
                    self.bland_used = True
            else:
                degenerate = 0
            self.pivot(r, j)
        raise RuntimeError("simplex iteration limit reached")


def _solve_standard(st: _Standard):
    m, nz = st.A.shape
    # phase I with one artificial per row
    A1 = np.hstack([st.A, np.eye(m)])
    c1 = np.concatenate([np.zeros(nz), np.ones(m)])
    tab = _Tableau(A1, st.b, range(nz, nz + m))
    allowed = np.ones(nz + m, dtype=bool)
    tab.run(c1, allowed)
    infeas = float(c1[tab.basis] @ tab.T[:, -1])
    basis1 = list(tab.basis)
    y1 = _duals(A1, c1, basis1)
    if infeas > FEAS_TOL * max(1.0, np.abs(st.b).max(initial=0)):
        return "infeasible", tab, y1, None
    # drive artificial variables out of the basis, dropping redundant rows
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if tab.basis[r] >= nz:
            row = tab.T[r, :nz]
            cand = np.flatnonzero(np.abs(row) > 1e-9)
            if cand.size:
                tab.pivot(r, int(cand[np.argmax(np.abs(row[cand]))]))
            else:
                keep[r] = False
    tab.T = tab.T[keep][:, list(range(nz)) + [nz + m]]
    tab.basis = [bj for bj, k in zip(tab.basis, keep) if k]
    status, j = tab.run(st.c, np.ones(nz, dtype=bool))
    return status, tab, keep, j


def _duals(A, c, basis):
    B = A[:, basis]
    y, *_ = np.linalg.lstsq(B.T, c[basis], rcond=None)
    return y


def solve_lp(lp: LinearProgram) -> LpOutcome:
    st = _standardize(lp)
    m, nz = st.A.shape
    if m == 0:
        # only sign constraints: optimal at z = 0 unless some cost is negative
        if np.any(st.c < -COST_TOL):
            return LpOutcome(LpStatus.UNBOUNDED)
        x = st.offset.copy()
        return LpOutcome(LpStatus.OPTIMAL, float(lp.objective @ x), x,
                         np.zeros(0), np.zeros(0))
    status, tab, info, j = _solve_standard(st)
    if status == "infeasible":
        y1 = info
        # phase-I duals: y.A <= 0 on the shifted variable columns and y.b > 0
        y = y1 * st.row_sign
        return LpOutcome(LpStatus.INFEASIBLE, farkas_eq=y[: st.n_eq],
                         farkas_ub=y[st.n_eq: st.n_eq + st.n_ub],
                         iterations=tab.iterations, bland_used=tab.bland_used)
    if status == "unbounded":
        return LpOutcome(LpStatus.UNBOUNDED, iterations=tab.iterations, bland_used=tab.bland_used)
    keep = info
    z = np.zeros(nz)
    z[tab.basis] = tab.T[:, -1]
    z = np.maximum(z, 0.0)
    x = st.offset + st.M @ z
    y_kept = _duals(st.A[keep], st.c, tab.basis)
    y = np.zeros(m)
    y[keep] = y_kept
    y *= st.row_sign
    if lp.maximize:
        y = -y
    value = float(lp.objective @ x)
    return LpOutcome(LpStatus.OPTIMAL, value, x, y[: st.n_eq], y[st.n_eq: st.n_eq + st.n_ub],
                     iterations=tab.iterations, bland_used=tab.bland_used)
