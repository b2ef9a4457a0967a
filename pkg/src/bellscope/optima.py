"""Constrained CHSH maxima per zero class, grid-scan oracles and maximally-entangled bounds."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from . import catalog
from .corrgeom import (
    CANONICAL_PATTERNS,
    ClassLabel,
    Correlation,
    chsh_value,
    mix,
)
from .cubic import CubicPoly
from .qstrategy import Povm, Strategy, born, born_mes, phi_plus

SQRT2 = math.sqrt(2)
_CHSH_SIGN = np.array([[[[(-1) ** (x * y + a + b + 1) for y in range(2)] for x in range(2)]
                        for b in range(2)] for a in range(2)], dtype=float)


@dataclass
class ClassOptimum:
    label: ClassLabel
    value: float
    strategy: Strategy
    trace: dict = field(default_factory=dict)


# ---------------------------------------------------------------- closed forms


def class3b_reduced_chsh(theta, alpha, beta):
    """CHSH value on the 3b family once the zero constraint holds (zeta = +-1)."""
    return 2 * (np.sin(theta) ** 2 * (np.cos(2 * alpha) - np.cos(2 * beta)) + 1)


def class3b_lagrange_residuals(theta: float, alpha: float, beta: float) -> dict:
    """Stationarity of S + lam * (tan a - tan b tan t) on the zeta = +1 branch."""
    s2 = math.sin(theta) ** 2
    sec2 = lambda v: 1 / math.cos(v) ** 2
    lam = 4 * s2 * math.sin(2 * alpha) / sec2(alpha)
    d_alpha = -4 * s2 * math.sin(2 * alpha) + lam * sec2(alpha)
    d_beta = 4 * s2 * math.sin(2 * beta) - lam * sec2(beta) * math.tan(theta)
    d_theta = (2 * math.sin(2 * theta) * (math.cos(2 * alpha) - math.cos(2 * beta))
               - lam * math.tan(beta) * sec2(theta))
    g = math.tan(alpha) - math.tan(beta) * math.tan(theta)
    return {"lambda": lam, "d_alpha": d_alpha, "d_beta": d_beta, "d_theta": d_theta,
            "constraint": g}


def closed_form_value(label) -> float:
    label = ClassLabel.parse(label)
    k = catalog.named_constants()
    if label is ClassLabel.C3A:
        return 10 * k.nu
    if label is ClassLabel.C3B:
        return 4 - 4 * (2 * k.kappa1 + k.kappa2)
    if label in (ClassLabel.C2A, ClassLabel.C2B):
        return 2.5
    if label is ClassLabel.C2C:
        return chsh_value(born(catalog.family("2c", catalog.cabello_params())))
    if label is ClassLabel.C1:
        return k.xi3
    if label is ClassLabel.C4B:
        return 2.0
    raise ValueError(f"class {label.value} has no quantum maximum")


def max_chsh_class(label) -> ClassOptimum:
    label = ClassLabel.parse(label)
    if label is ClassLabel.C4A:
        raise ValueError("class 4a admits no quantum (not even no-signalling) realisation")
    if label is ClassLabel.C4B:
        raise ValueError("class 4b is local: its CHSH maximum is the local bound 2")
    trace: dict = {}
    if label is ClassLabel.C3A:
        s = catalog.family("3a", catalog.hardy_params())
    elif label is ClassLabel.C3B:
        p = catalog.q_params()
        s = catalog.family("3b", p)
        trace["zeta"] = 1
        trace.update(class3b_lagrange_residuals(p.theta, p.alpha, p.beta))
        trace["reduced_chsh"] = float(class3b_reduced_chsh(p.theta, p.alpha, p.beta))
    elif label is ClassLabel.C2A:
        s = catalog.family("2a", catalog.q2_params())
    elif label is ClassLabel.C2B:
        s = catalog.family("2b", catalog.q3_params())
    elif label is ClassLabel.C2C:
        s = catalog.family("2c", catalog.cabello_params())
    elif label is ClassLabel.C1:
        s = catalog.family("1", catalog.q4_params())
        k = catalog.named_constants()
        trace["cubic_residuals"] = [abs(CubicPoly(P)(r)) for P, r in
                                    ((catalog.P1, k.xi1), (catalog.P2, k.xi2), (catalog.P3, k.xi3))]
    else:
        raise ValueError(f"no maximum defined for {label.value}")
    return ClassOptimum(label, closed_form_value(label), s, trace)


# ---------------------------------------------------------------- batched real Born rule


def _obs(cz, cx) -> np.ndarray:
    """Bloch rows (0, cz, cx) over the basis (1, sz, sx)."""
    cz = np.asarray(cz, dtype=float)
    return np.stack([np.zeros_like(cz), cz, np.broadcast_to(cx, cz.shape)], axis=-1)


def correlation_matrix(psi: np.ndarray) -> np.ndarray:
    """T[n, i, j] = <psi| s_i (x) s_j |psi> for real states and s in (1, sz, sx)."""
    a, b, c, d = psi[:, 0, 0], psi[:, 0, 1], psi[:, 1, 0], psi[:, 1, 1]
    T = np.empty((psi.shape[0], 3, 3))
    aa, bb, cc, dd = a * a, b * b, c * c, d * d
    T[:, 0, 0] = aa + bb + cc + dd
    T[:, 0, 1] = aa - bb + cc - dd
    T[:, 0, 2] = 2 * (a * b + c * d)
    T[:, 1, 0] = aa + bb - cc - dd
    T[:, 1, 1] = aa - bb - cc + dd
    T[:, 1, 2] = 2 * (a * b - c * d)
    T[:, 2, 0] = 2 * (a * c + b * d)
    T[:, 2, 1] = 2 * (a * c - b * d)
    T[:, 2, 2] = 2 * (a * d + b * c)
    return T


def real_born_batch(psi: np.ndarray, va: np.ndarray, vb: np.ndarray) -> np.ndarray:
    """psi (N,2,2); va, vb Bloch rows (N, setting, 3).  Returns p indexed (N,a,b,x,y)."""
    T = correlation_matrix(psi)
    e = np.einsum("nxp,npq,nyq->nxy", va, T, vb)
    ma = np.einsum("nxp,np->nx", va, T[:, :, 0])
    mb = np.einsum("nyq,nq->ny", vb, T[:, 0, :])
    sg = np.array([1.0, -1.0])
    return (1 + sg[None, :, None, None, None] * ma[:, None, None, :, None]
            + sg[None, None, :, None, None] * mb[:, None, None, None, :]
            + (sg[:, None] * sg[None, :])[None, :, :, None, None] * e[:, None, None, :, :]) / 4


def chsh_batch(p: np.ndarray) -> np.ndarray:
    return np.einsum("nabxy,abxy->n", p, _CHSH_SIGN)


def _rot(angle, sign=-1.0):
    return np.cos(2 * angle), sign * np.sin(2 * angle)


def _family_batch(label: ClassLabel, th, al, be, ph=None, zeta=1.0) -> np.ndarray:
    n = th.shape[0]
    psi = np.zeros((n, 2, 2))
    z = _obs(np.ones(n), 0.0)
    if label in (ClassLabel.C3A, ClassLabel.C2B):
        s = np.sin(th)
        psi[:, 0, 1] = s * np.cos(al)
        psi[:, 1, 0] = np.cos(th)
        psi[:, 1, 1] = -s * np.sin(al)
        va = np.stack([z, _obs(*_rot(al))], axis=1)
        vb = np.stack([z, _obs(*_rot(be))], axis=1)
    elif label is ClassLabel.C3B:
        # zeta = cos(relative phase); only the real branches +-1 carry the zeros
        psi[:, 0, 1] = np.cos(th)
        psi[:, 1, 0] = zeta * np.sin(th)
        va = np.stack([z, _obs(*_rot(al))], axis=1)
        vb = np.stack([z, _obs(-np.cos(2 * be), -np.sin(2 * be))], axis=1)
    elif label is ClassLabel.C2A:
        psi[:, 0, 0] = np.cos(th)
        psi[:, 1, 1] = -np.sin(th)
        va = np.stack([z, _obs(*_rot(al, 1.0))], axis=1)
        vb = np.stack([-z, _obs(*_rot(be))], axis=1)
    elif label in (ClassLabel.C2C, ClassLabel.C1):
        c = np.cos(ph)
        psi[:, 0, 1] = c * np.cos(th)
        psi[:, 1, 0] = c * np.sin(th)
        psi[:, 1, 1] = np.sin(ph)
        va = np.stack([z, _obs(*_rot(al))], axis=1)
        vb = np.stack([z, _obs(*_rot(be))], axis=1)
    else:
        raise ValueError(f"no scan family for {label.value}")
    return real_born_batch(psi, va, vb)


def _midpoints(n: int, lo: float = 0.0, hi: float = math.pi) -> np.ndarray:
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


_PATTERN_CELLS = {lab: np.array([[a, b, x, y] for (a, b, x, y) in sorted(CANONICAL_PATTERNS[lab].cells)])
                  for lab in CANONICAL_PATTERNS}


def _class_ok(label: ClassLabel, p: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    cells = _PATTERN_CELLS[label]
    vals = p[:, cells[:, 0], cells[:, 1], cells[:, 2], cells[:, 3]]
    return np.all(vals <= tol, axis=1)


SCAN_AXES = {
    ClassLabel.C3A: ("alpha", "beta"),
    ClassLabel.C3B: ("alpha", "beta"),
    ClassLabel.C2A: ("theta", "alpha", "beta"),
    ClassLabel.C2B: ("theta", "alpha", "beta"),
    ClassLabel.C2C: ("theta", "alpha", "beta"),
    ClassLabel.C1: ("theta", "alpha", "beta", "phi"),
}


def _evaluate(label: ClassLabel, pts: np.ndarray, zeta: float = 1.0):
    """Correlations for parameter rows (ordered as SCAN_AXES) after applying constraints."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if label is ClassLabel.C3A:
            al, be = pts[:, 0], pts[:, 1]
            th = np.arctan(np.tan(be) / np.sin(al))
            return _family_batch(label, th, al, be)
        if label is ClassLabel.C3B:
            al, be = pts[:, 0], pts[:, 1]
            th = np.arctan(zeta * np.tan(al) / np.tan(be))
            return _family_batch(label, th, al, be, zeta=zeta)
        if label is ClassLabel.C2C:
            th, al, be = pts.T
            ph = np.arctan(np.sin(th) / np.tan(be) - np.tan(al) * np.cos(th))
            return _family_batch(label, th, al, be, ph)
        if label is ClassLabel.C1:
            th, al, be, ph = pts.T
            return _family_batch(label, th, al, be, ph)
        th, al, be = pts.T
        return _family_batch(label, th, al, be)


def _grid_chunks(axes: list[np.ndarray], chunk: int) -> Iterator[np.ndarray]:
    shape = tuple(len(a) for a in axes)
    total = int(np.prod(shape))
    for start in range(0, total, chunk):
        idx = np.unravel_index(np.arange(start, min(total, start + chunk)), shape)
        yield np.column_stack([a[i] for a, i in zip(axes, idx)])


@dataclass
class ScanResult:
    label: ClassLabel
    grid_n: int
    scan_max: float
    closed_form: float
    gap: float
    argmax: dict
    evaluated: int
    in_class: int


def _scan_max(label, axes, zetas, chunk, writer=None):
    best, best_pt, best_zeta = -np.inf, None, None
    n_eval = n_ok = 0
    for zeta in zetas:
        for pts in _grid_chunks(axes, chunk):
            p = _evaluate(label, pts, zeta)
            ok = _class_ok(label, p) & np.all(np.isfinite(p), axis=(1, 2, 3, 4))
            s = chsh_batch(np.nan_to_num(p))
            n_eval += len(pts)
            n_ok += int(ok.sum())
            if writer is not None:
                for row, sv, o in zip(pts, s, ok):
                    writer.writerow([repr(float(v)) for v in row] + [repr(float(sv)), int(o)])
            if ok.any():
                k = int(np.argmax(np.where(ok, s, -np.inf)))
                if s[k] > best:
                    best, best_pt, best_zeta = float(s[k]), pts[k].copy(), zeta
    return best, best_pt, best_zeta, n_eval, n_ok


def scan_verify(label, grid_n: int, refine: int = 0, csv_path: Optional[str] = None,
                chunk: int = 200_000, budget: Optional[int] = None) -> ScanResult:
    """Exhaustive midpoint-grid maximum of CHSH over a class family.

    Phases enter the 3b family only through zeta = cos(total phase); the zeros
    force zeta = +-1, so both real branches are scanned.  ``budget`` caps the
    number of grid points by shrinking the per-axis resolution, and ``refine``
    adds zoomed grids around the incumbent.
    """
    label = ClassLabel.parse(label)
    if label not in SCAN_AXES:
        raise ValueError(f"no scan defined for class {label.value}")
    if grid_n < 50:
        raise ValueError("grid_n must be at least 50")
    names = SCAN_AXES[label]
    n = grid_n
    if budget is not None:
        n = max(2, min(grid_n, int(budget ** (1 / len(names)))))
    axes = [_midpoints(n) for _ in names]
    zetas = (1.0, -1.0) if label is ClassLabel.C3B else (1.0,)
    fh = open(csv_path, "w", newline="") if csv_path else None
    try:
        writer = None
        if fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(list(names) + ["S", "class_ok"])
        best, pt, zeta, n_eval, n_ok = _scan_max(label, axes, zetas, chunk, writer)
        step = math.pi / n
        for _ in range(refine):
            if pt is None:
                break
            local = [np.linspace(v - step, v + step, 21) for v in pt]
            b2, p2, z2, e2, o2 = _scan_max(label, local, (zeta,), chunk)
            n_eval += e2
            n_ok += o2
            if b2 > best:
                best, pt = b2, p2
            step /= 10
    finally:
        if fh:
            fh.close()
    closed = closed_form_value(label)
    arg = dict(zip(names, map(float, pt))) if pt is not None else {}
    if zeta is not None and label is ClassLabel.C3B:
        arg["zeta"] = zeta
    return ScanResult(label, n, best, closed, closed - best, arg, n_eval, n_ok)


# ---------------------------------------------------------------- success probability


def success_probability_D(c: Correlation, tol: float = 1e-9) -> float:
    """p(1,1|1,1) - p(1,1|0,1) on the 2b zero pattern."""
    if c(0, 0, 0, 0) > tol or c(1, 1, 1, 0) > tol:
        raise ValueError("correlation does not carry the 2b zeros p(0,0|0,0) = p(1,1|1,0) = 0")
    return float(c(1, 1, 1, 1) - c(1, 1, 0, 1))


# ---------------------------------------------------------------- maximally entangled states


def max_chsh_mes(d: int) -> float:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if d % 2 == 0:
        return 2 * SQRT2
    return 2 * SQRT2 * (d - 1) / d + 2 / d


@dataclass
class BlockStrategy:
    d: int
    strategy: Strategy
    decomposition: list  # (weight, Correlation, nonlocal: bool)

    def correlation(self) -> Correlation:
        return born_mes(self.d, self.strategy.measA, self.strategy.measB)

    def remix(self) -> Correlation:
        return mix([(w, c) for w, c, _ in self.decomposition], tol=1e-12)


def _bloch(t: float) -> np.ndarray:
    return np.array([[math.cos(t), math.sin(t)], [math.sin(t), -math.cos(t)]])


# Bloch angles of the CHSH-optimal qubit block on |Phi+>
BLOCK_ANGLES = ((0.0, math.pi / 2), (-3 * math.pi / 4, 3 * math.pi / 4))


def construct_block_strategy(d: int) -> BlockStrategy:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    nq, nscalar = d // 2, d % 2
    obsA = [np.zeros((d, d)) for _ in range(2)]
    obsB = [np.zeros((d, d)) for _ in range(2)]
    for k in range(nq):
        s = slice(2 * k, 2 * k + 2)
        for x in range(2):
            obsA[x][s, s] = _bloch(BLOCK_ANGLES[0][x])
            obsB[x][s, s] = _bloch(BLOCK_ANGLES[1][x])
    if nscalar:
        for x in range(2):
            obsA[x][d - 1, d - 1] = 1.0
            obsB[x][d - 1, d - 1] = -1.0
    strat = Strategy.from_observables(phi_plus(d), obsA, obsB)
    decomposition = []
    if nq:
        qubit = born_mes(2, [Povm.from_observable(_bloch(t)) for t in BLOCK_ANGLES[0]],
                         [Povm.from_observable(_bloch(t)) for t in BLOCK_ANGLES[1]])
        decomposition += [(2 / d, qubit, True) for _ in range(nq)]
    if nscalar:
        p = np.zeros((2, 2, 2, 2))
        p[0, 1] = 1.0
        decomposition.append((1 / d, Correlation(p), False))
    return BlockStrategy(d, strat, decomposition)
