"""Dense homogeneous self-dual interior point method for orthant x PSD cone programs.

Problem form::

    minimise    c.x
    subject to  h - G x = s,  s in K   (K = nonnegative orthant x PSD blocks)
                A x = b

PSD blocks are stored as svec vectors (upper triangle, off-diagonals scaled by
sqrt 2) so inner products are plain dot products.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)


class SdpStatus(str, enum.Enum):
    CONVERGED = "Converged"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITER = "MaxIterations"
    NUMERICAL = "NumericalFailure"


def svec(M: np.ndarray) -> np.ndarray:
    k = M.shape[-1]
    iu = np.triu_indices(k)
    scale = np.where(iu[0] == iu[1], 1.0, SQRT2)
    return M[..., iu[0], iu[1]] * scale


def smat(v: np.ndarray, k: int) -> np.ndarray:
    iu = np.triu_indices(k)
    scale = np.where(iu[0] == iu[1], 1.0, 1.0 / SQRT2)
    M = np.zeros(v.shape[:-1] + (k, k))
    M[..., iu[0], iu[1]] = v * scale
    M[..., iu[1], iu[0]] = v * scale
    return M


@dataclass
class ConeProgram:
    c: np.ndarray
    G: np.ndarray
    h: np.ndarray
    n_lin: int
    psd_dims: tuple
    A: np.ndarray
    b: np.ndarray

    @classmethod
    def build(cls, c, lin=None, psd: Sequence = (), eq=None) -> "ConeProgram":
        """lin = (G, h) rows meaning G x <= h; psd = [(F0, Fs)] meaning F0 + sum x_i Fs[i] >= 0."""
        c = np.asarray(c, dtype=float).reshape(-1)
        n = c.size
        rows, rhs = [], []
        n_lin = 0
        if lin is not None and np.size(lin[1]):
            Gl = np.atleast_2d(np.asarray(lin[0], dtype=float))
            hl = np.asarray(lin[1], dtype=float).reshape(-1)
            rows.append(Gl)
            rhs.append(hl)
            n_lin = hl.size
        dims = []
        for F0, Fs in psd:
            F0 = np.asarray(F0, dtype=float)
            Fs = np.asarray(Fs, dtype=float)
            k = F0.shape[0]
            if Fs.shape != (n, k, k):
                raise ValueError("PSD coefficient stack must have shape (n, k, k)")
            rows.append(-svec(Fs).T)
            rhs.append(svec(F0))
            dims.append(k)
        G = np.vstack(rows) if rows else np.zeros((0, n))
        h = np.concatenate(rhs) if rhs else np.zeros(0)
        if eq is None:
            A, b = np.zeros((0, n)), np.zeros(0)
        else:
            A = np.atleast_2d(np.asarray(eq[0], dtype=float)).reshape(-1, n)
            b = np.asarray(eq[1], dtype=float).reshape(-1)
        return cls(c, G, h, n_lin, tuple(dims), A, b)

    @property
    def degree(self) -> int:
        return self.n_lin + sum(self.psd_dims)


@dataclass
class ConeSolution:
    status: SdpStatus
    x: np.ndarray
    s: np.ndarray
    z: np.ndarray
    y: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    history: list = field(default_factory=list)


# ------------------------------------------------------------- cone helpers


class _Cone:
    def __init__(self, n_lin: int, dims: tuple):
        self.n_lin = n_lin
        self.dims = dims
        self.slices = []
        off = n_lin
        for k in dims:
            w = k * (k + 1) // 2
            self.slices.append(slice(off, off + w))
            off += w
        self.size = off

    def blocks(self, v):
        return [smat(v[sl], k) for sl, k in zip(self.slices, self.dims)]

    def identity(self) -> np.ndarray:
        e = np.zeros(self.size)
        e[: self.n_lin] = 1.0
        for sl, k in zip(self.slices, self.dims):
            e[sl] = svec(np.eye(k))
        return e


@dataclass
class _Scaling:
    w: np.ndarray  # orthant: s = w^2 z
    R: list  # PSD: W z = R^T Z R
    Rinv: list
    lam_lin: np.ndarray
    lam_psd: list  # diagonal of Lambda per block


def _nt_scaling(cone: _Cone, s: np.ndarray, z: np.ndarray) -> _Scaling:
    nl = cone.n_lin
    w = np.sqrt(s[:nl] / z[:nl])
    lam_lin = np.sqrt(s[:nl] * z[:nl])
    Rs, Rinvs, lams = [], [], []
    for S, Z in zip(cone.blocks(s), cone.blocks(z)):
        Ls = np.linalg.cholesky(S)
        Lz = np.linalg.cholesky(Z)
        U, lam, Vt = np.linalg.svd(Lz.T @ Ls)
        R = Ls @ Vt.T / np.sqrt(lam)
        Rinv = (np.sqrt(lam)[:, None] * Vt) @ np.linalg.inv(Ls)
        Rs.append(R)
        Rinvs.append(Rinv)
        lams.append(lam)
    return _Scaling(w, Rs, Rinvs, lam_lin, lams)


def _apply(cone: _Cone, W: _Scaling, v: np.ndarray, kind: str) -> np.ndarray:
    """kind: 'W' (W v), 'WT' (W^T v), 'Winv' (W^-1 v), 'WinvT' (W^-T v). v may be (size,) or (size, n)."""
    out = np.empty_like(v)
    nl = cone.n_lin
    d = W.w if kind in ("W", "WT") else 1.0 / W.w
    if v.ndim == 1:
        out[:nl] = v[:nl] * d
    else:
        out[:nl] = v[:nl] * d[:, None]
    for sl, k, R, Rinv in zip(cone.slices, cone.dims, W.R, W.Rinv):
        blk = v[sl] if v.ndim == 1 else v[sl].T
        M = smat(blk, k)
        if kind == "W":
            P = np.swapaxes(R, -1, -2) @ M @ R
        elif kind == "WT":
            P = R @ M @ R.T
        elif kind == "Winv":
            P = Rinv.T @ M @ Rinv
        else:
            P = Rinv @ M @ Rinv.T
        res = svec(P)
        out[sl] = res if v.ndim == 1 else res.T
    return out


def _lam_vec(cone: _Cone, W: _Scaling) -> np.ndarray:
    lam = np.zeros(cone.size)
    lam[: cone.n_lin] = W.lam_lin
    for sl, l in zip(cone.slices, W.lam_psd):
        lam[sl] = svec(np.diag(l))
    return lam


def _jprod(cone: _Cone, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.zeros(cone.size)
    nl = cone.n_lin
    out[:nl] = u[:nl] * v[:nl]
    for sl, k in zip(cone.slices, cone.dims):
        U, V = smat(u[sl], k), smat(v[sl], k)
        out[sl] = svec((U @ V + V @ U) / 2)
    return out


def _lam_solve(cone: _Cone, W: _Scaling, dg: np.ndarray) -> np.ndarray:
    """u with lambda o u = dg."""
    out = np.zeros(cone.size)
    nl = cone.n_lin
    out[:nl] = dg[:nl] / W.lam_lin
    for sl, k, l in zip(cone.slices, cone.dims, W.lam_psd):
        D = smat(dg[sl], k)
        out[sl] = svec(2 * D / (l[:, None] + l[None, :]))
    return out


def _max_step(cone: _Cone, W: _Scaling, d: np.ndarray) -> float:
    """Largest a with lambda + a d in the cone (inf if unbounded)."""
    a = np.inf
    nl = cone.n_lin
    neg = d[:nl] < 0
    if np.any(neg):
        a = min(a, float(np.min(-W.lam_lin[neg] / d[:nl][neg])))
    for sl, k, l in zip(cone.slices, cone.dims, W.lam_psd):
        D = smat(d[sl], k)
        r = 1.0 / np.sqrt(l)
        ev = np.linalg.eigvalsh(r[:, None] * D * r[None, :])
        if ev[0] < 0:
            a = min(a, -1.0 / ev[0])
    return a


# ---------------------------------------------------------------- solver


def solve_cone(prob: ConeProgram, max_iter: int = 200, feastol: float = 1e-10,
               reltol: float = 1e-11, abstol: float = 1e-11, step: float = 0.98,
               refine: int = 2, acceptable: float = 1e-8) -> ConeSolution:
    """Homogeneous self-dual embedding with NT scaling and Mehrotra correction.

    Iterates towards the tight tolerances; if progress stalls, the best iterate that
    met the ``acceptable`` tolerance (residuals and relative gap) is reported as
    converged.
    """
    c, G, h, A, b = prob.c, prob.G, prob.h, prob.A, prob.b
    n, p = c.size, b.size
    cone = _Cone(prob.n_lin, prob.psd_dims)
    if G.shape[0] != cone.size:
        raise ValueError("cone dimension mismatch")
    m = prob.degree
    e = cone.identity()
    x, y = np.zeros(n), np.zeros(p)
    s, z = e.copy(), e.copy()
    tau, kappa = 1.0, 1.0
    res_x0 = max(1.0, np.linalg.norm(c))
    res_z0 = max(1.0, np.linalg.norm(np.concatenate([h, b])))
    history = []
    status = SdpStatus.MAX_ITER
    pcost = dcost = gap = float("nan")
    best = None
    it = 0
    for it in range(max_iter + 1):
        rx = A.T @ y + G.T @ z + c * tau
        ry = b * tau - A @ x
        rz = s + G @ x - h * tau
        rt = kappa + c @ x + b @ y + h @ z
        sz = s @ z
        mu = (sz + tau * kappa) / (m + 1)
        pcost = c @ x / tau
        dcost = -(h @ z + b @ y) / tau
        gap = sz / tau ** 2
        pres = max(np.linalg.norm(rz), np.linalg.norm(ry)) / tau / res_z0
        dres = np.linalg.norm(rx) / tau / res_x0
        relgap = gap / max(1.0, abs(pcost), abs(dcost))
        history.append((pcost, dcost, gap, pres, dres, tau, kappa))
        if pres <= feastol and dres <= feastol and (gap <= abstol or relgap <= reltol):
            status = SdpStatus.CONVERGED
            break
        score = max(pres, dres, min(gap, relgap))
        if score <= acceptable and (best is None or score < best[0]):
            best = (score, x.copy(), s.copy(), z.copy(), y.copy(), tau, it)
        hz = h @ z + b @ y
        if hz < 0 and np.linalg.norm(G.T @ z + A.T @ y) / -hz <= acceptable * res_x0 and \
                tau < 1e-3 * kappa:
            status = SdpStatus.INFEASIBLE
            break
        cx = c @ x
        if cx < 0 and max(np.linalg.norm(G @ x + s), np.linalg.norm(A @ x)) / -cx <= acceptable * res_z0 \
                and tau < 1e-3 * kappa:
            status = SdpStatus.UNBOUNDED
            break
        if it == max_iter:
            break
        try:
            W = _nt_scaling(cone, s, z)
            Gs = _apply(cone, W, G, "WinvT")
            H = Gs.T @ Gs
            K = np.zeros((n + p, n + p))
            K[:n, :n] = H
            K[:n, n:] = A.T
            K[n:, :n] = A
            lu = _Factor(K)
        except np.linalg.LinAlgError:
            status = SdpStatus.NUMERICAL
            break
        lam = _lam_vec(cone, W)
        if not np.all(np.isfinite(Gs)):
            status = SdpStatus.NUMERICAL
            break

        def kkt(r1, r2, r3):
            # scaled system: A'dy + Gs'dzt = r1, A dx = r2, Gs dx - dzt = r3 (r3 already W^-T scaled)
            dx = np.zeros(n)
            dy = np.zeros(p)
            dzt = np.zeros(cone.size)
            e1, e2, e3 = r1, r2, r3
            for _ in range(1 + refine):
                sol = lu.solve(np.concatenate([e1 + Gs.T @ e3, e2]))
                cx, cy = sol[:n], sol[n:]
                dx, dy, dzt = dx + cx, dy + cy, dzt + Gs @ cx - e3
                e1 = r1 - A.T @ dy - Gs.T @ dzt
                e2 = r2 - A @ dx
                e3 = r3 - Gs @ dx + dzt
            return dx, dy, dzt

        vx, vy, vzt = kkt(-c, b, _apply(cone, W, h, "WinvT"))
        vz = _apply(cone, W, vzt, "Winv")
        rz_s = _apply(cone, W, rz, "WinvT")

        def direction(dg, dgt):
            u0 = _lam_solve(cone, W, dg)
            ux, uy, uzt = kkt(-rx, ry, -rz_s - u0)
            uz = _apply(cone, W, uzt, "Winv")
            coef = -kappa / tau + c @ vx + b @ vy + h @ vz
            dtau = (-rt - dgt / tau - c @ ux - b @ uy - h @ uz) / coef
            dx = ux + dtau * vx
            dy = uy + dtau * vy
            dzt = uzt + dtau * vzt
            dst = u0 - dzt
            dkap = (dgt - kappa * dtau) / tau
            return dx, dy, dzt, dst, dtau, dkap

        def steplen(dzt, dst, dtau, dkap):
            a = min(_max_step(cone, W, dzt), _max_step(cone, W, dst))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkap < 0:
                a = min(a, -kappa / dkap)
            return a

        lamsq = _jprod(cone, lam, lam)
        aff = direction(-lamsq, -tau * kappa)
        a_aff = min(1.0, steplen(*aff[2:]))
        sigma = (1.0 - a_aff) ** 3
        corr = _jprod(cone, aff[3], aff[2])
        dg = -lamsq + sigma * mu * e - corr
        dgt = -tau * kappa + sigma * mu - aff[4] * aff[5]
        dx, dy, dzt, dst, dtau, dkap = direction(dg, dgt)
        a = min(1.0, step * steplen(dzt, dst, dtau, dkap))
        x = x + a * dx
        y = y + a * dy
        z = z + a * _apply(cone, W, dzt, "Winv")
        s = s + a * _apply(cone, W, dst, "WT")
        tau += a * dtau
        kappa += a * dkap
        if not (np.all(np.isfinite(x)) and tau > 0):
            status = SdpStatus.NUMERICAL
            break
    if status in (SdpStatus.INFEASIBLE, SdpStatus.UNBOUNDED):
        return ConeSolution(status, x, s, z, y, float("nan"), float("nan"), float("nan"), it, history)
    if status is not SdpStatus.CONVERGED and best is not None:
        _, x, s, z, y, tau, _ = best
        status = SdpStatus.CONVERGED
    xs, ss, zs, ys = x / tau, s / tau, z / tau, y / tau
    pv, dv = float(c @ xs), float(-(h @ zs + b @ ys))
    return ConeSolution(status, xs, ss, zs, ys, pv, dv,
                        max(float(ss @ zs), abs(pv - dv)), it, history)


class _Factor:
    """LU factorisation of the reduced KKT matrix, falling back to least squares."""

    def __init__(self, K):
        import scipy.linalg as sla
        self._sla = sla
        self.K = K
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)  # singular -> lstsq
                self.lu = sla.lu_factor(K, check_finite=True)
        except (ValueError, sla.LinAlgError, sla.LinAlgWarning):
            self.lu = None

    def solve(self, rhs):
        if self.lu is not None:
            out = self._sla.lu_solve(self.lu, rhs)
            if np.all(np.isfinite(out)):
                return out
        return np.linalg.lstsq(self.K, rhs, rcond=None)[0]
