"""Behaviors of the two-party, two-setting, two-outcome Bell scenario.

A behavior is stored as a dense array ``p[a, b, x, y]``.  The printed table
layout used for JSON puts Bob's (y, b) on rows and Alice's (x, a) on columns,
so cell ``table[2*y + b, 2*x + a] = p[a, b, x, y]``.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

ZERO_TOL = 1e-9
CELLS = tuple(itertools.product(range(2), repeat=4))  # (a, b, x, y), lexicographic


class InvalidCorrelation(ValueError):
    pass


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Correlation:
    p: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        if arr.shape != (2, 2, 2, 2):
            raise InvalidCorrelation(f"expected shape (2,2,2,2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidCorrelation("non-finite probability")
        object.__setattr__(self, "p", _freeze(arr))

    def __call__(self, a: int, b: int, x: int, y: int) -> float:
        return float(self.p[a, b, x, y])

    def vector(self) -> np.ndarray:
        """16 cells in lexicographic (a, b, x, y) order."""
        return self.p.reshape(16).copy()

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "Correlation":
        return cls(np.asarray(v, dtype=float).reshape(2, 2, 2, 2))

    def table(self) -> np.ndarray:
        return self.p.transpose(3, 1, 2, 0).reshape(4, 4).copy()

    @classmethod
    def from_table(cls, table) -> "Correlation":
        t = np.asarray(table, dtype=float)
        if t.shape != (4, 4):
            raise InvalidCorrelation(f"expected a 4x4 table, got {t.shape}")
        # rows (y, b), columns (x, a)
        return cls(t.reshape(2, 2, 2, 2).transpose(3, 1, 2, 0))

    def allclose(self, other: "Correlation", atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.p - other.p)) <= atol)

    def __repr__(self):
        rows = "; ".join(" ".join(f"{v:.6g}" for v in r) for r in self.table())
        return f"Correlation([{rows}])"


@dataclass(frozen=True)
class ValidityReport:
    nonneg: bool
    normalized: bool
    no_signaling: bool

    @property
    def ok(self) -> bool:
        return self.nonneg and self.normalized and self.no_signaling


@dataclass(frozen=True, eq=False)
class BellFunctional:
    coefficients: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coefficients, dtype=float).reshape(2, 2, 2, 2)
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coefficients", _freeze(arr))

    def __call__(self, c: Correlation) -> float:
        return float(np.sum(self.coefficients * c.p))

    def vector(self) -> np.ndarray:
        return self.coefficients.reshape(16).copy()


def validate(c: Correlation, tol: float = ZERO_TOL) -> ValidityReport:
    assert tol > 0
    p = c.p
    nonneg = bool(p.min() >= -tol)
    normalized = bool(np.all(np.abs(p.sum(axis=(0, 1)) - 1.0) <= tol))
    alice = p.sum(axis=1)  # [a, x, y]
    bob = p.sum(axis=0)  # [b, x, y]
    ns = bool(
        np.all(np.abs(alice[:, :, 0] - alice[:, :, 1]) <= tol)
        and np.all(np.abs(bob[:, 0, :] - bob[:, 1, :]) <= tol)
    )
    return ValidityReport(nonneg, normalized, ns)


def marginals(c: Correlation) -> tuple[np.ndarray, np.ndarray]:
    """Alice's p(a|x) and Bob's p(b|y), read off the y=0 / x=0 blocks."""
    return c.p.sum(axis=1)[:, :, 0], c.p.sum(axis=0)[:, 0, :]


_SIGN = np.array([1.0, -1.0])
CHSH = BellFunctional(
    np.fromfunction(
        lambda a, b, x, y: (-1.0) ** (x * y + a + b + 1), (2, 2, 2, 2), dtype=int
    )
)


def correlator(c: Correlation, x: int, y: int) -> float:
    return float(_SIGN @ c.p[:, :, x, y] @ _SIGN)


def chsh_value(c: Correlation) -> float:
    return CHSH(c)


def uniform() -> Correlation:
    return Correlation(np.full((2, 2, 2, 2), 0.25))


def pr_box(alpha: int, beta: int, gamma: int) -> Correlation:
    p = np.zeros((2, 2, 2, 2))
    for a, b, x, y in CELLS:
        if a ^ b == (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma:
            p[a, b, x, y] = 0.5
    return Correlation(p)


def deterministic_point(j: int) -> Correlation:
    if not 0 <= j < 16:
        raise IndexError(f"deterministic point index {j} outside 0..15")
    p = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product(range(2), repeat=2):
        a = ((j % 2) * x) ^ ((j % 4) // 2)
        b = (((j % 8) // 4) * y) ^ (j // 8)
        p[a, b, x, y] = 1.0
    return Correlation(p)


@lru_cache(maxsize=None)
def deterministic_matrix() -> np.ndarray:
    """16x16 array whose column j is deterministic_point(j) as a vector."""
    cols = [deterministic_point(j).vector() for j in range(16)]
    m = np.column_stack(cols)
    m.setflags(write=False)
    return m


def mix(terms: Iterable[tuple[float, Correlation]], tol: float = 1e-9) -> Correlation:
    terms = list(terms)
    if not terms:
        raise ValueError("empty mixture")
    weights = np.array([w for w, _ in terms], dtype=float)
    if np.any(weights < -tol):
        raise ValueError("negative mixture weight")
    if abs(weights.sum() - 1.0) > tol:
        raise ValueError(f"mixture weights sum to {weights.sum()}, not 1")
    return Correlation(sum(w * c.p for w, c in terms))


# ---------------------------------------------------------------- relabelings


@dataclass(frozen=True)
class Relabeling:
    """Party swap, then setting swaps, then setting-dependent outcome flips."""

    a_flip: tuple[int, int] = (0, 0)
    b_flip: tuple[int, int] = (0, 0)
    x_swap: int = 0
    y_swap: int = 0
    party_swap: int = 0

    def cell_map(self, a: int, b: int, x: int, y: int) -> tuple[int, int, int, int]:
        """Source cell of the relabeled behavior's cell (a, b, x, y)."""
        x0, y0 = x ^ self.x_swap, y ^ self.y_swap
        a0, b0 = a ^ self.a_flip[x], b ^ self.b_flip[y]
        if self.party_swap:
            return b0, a0, y0, x0
        return a0, b0, x0, y0

    def permutation(self) -> np.ndarray:
        """perm[i] = flat index of the source of target cell i."""
        return _perm(self)

    def compose(self, other: "Relabeling") -> "Relabeling":
        """Relabeling equivalent to applying ``other`` first, then ``self``."""
        target = other.permutation()[self.permutation()]
        return _by_perm()[tuple(target)]

    @staticmethod
    def identity() -> "Relabeling":
        return Relabeling()


@lru_cache(maxsize=None)
def _perm(r: Relabeling) -> np.ndarray:
    idx = {cell: i for i, cell in enumerate(CELLS)}
    out = np.array([idx[r.cell_map(*cell)] for cell in CELLS])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=1)
def relabeling_group() -> tuple[Relabeling, ...]:
    group = []
    for bits in itertools.product(range(2), repeat=7):
        group.append(Relabeling((bits[0], bits[1]), (bits[2], bits[3]), *bits[4:]))
    return tuple(group)


@lru_cache(maxsize=1)
def _by_perm() -> dict:
    return {tuple(r.permutation()): r for r in relabeling_group()}


def apply_relabeling(c: Correlation, r: Relabeling) -> Correlation:
    return Correlation.from_vector(c.vector()[r.permutation()])


def relabel_functional(f: BellFunctional, r: Relabeling) -> BellFunctional:
    """Functional g with g(apply_relabeling(c, r)) = f(c)."""
    return BellFunctional(f.vector()[r.permutation()].reshape(2, 2, 2, 2))


# ---------------------------------------------------------------- zero classes


class ClassLabel(str, enum.Enum):
    NONE = "none"
    C1 = "1"
    C2A = "2a"
    C2B = "2b"
    C2C = "2c"
    C3A = "3a"
    C3B = "3b"
    C4A = "4a"
    C4B = "4b"
    LOCAL_BY_LEMMA1 = "local-by-lemma1"
    UNPHYSICAL = "unphysical"

    @classmethod
    def parse(cls, s) -> "ClassLabel":
        if isinstance(s, cls):
            return s
        s = str(s).strip().lower()
        for m in cls:
            if m.value == s or m.name.lower() == s:
                return m
        raise ValueError(f"unknown class label {s!r}")


@dataclass(frozen=True)
class ZeroPattern:
    cells: frozenset

    def __post_init__(self):
        cells = frozenset(tuple(int(v) for v in c) for c in self.cells)
        bad = [c for c in cells if c not in CELLS]
        if bad:
            raise ValueError(f"not a cell: {bad[0]}")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def of(cls, *cells) -> "ZeroPattern":
        return cls(frozenset(cells))

    def mask(self) -> int:
        # bit 15 is cell 0 so that smaller masks prefer later cells; any fixed
        # convention works as long as it is used consistently
        return sum(1 << (15 - CELLS.index(c)) for c in self.cells)

    def __len__(self):
        return len(self.cells)

    def relabeled(self, r: Relabeling) -> "ZeroPattern":
        perm = r.permutation()
        inv = np.empty(16, dtype=int)
        inv[perm] = np.arange(16)
        return ZeroPattern(frozenset(CELLS[inv[CELLS.index(c)]] for c in self.cells))

    def flat(self) -> list[int]:
        return sorted(CELLS.index(c) for c in self.cells)


def zero_pattern(c: Correlation, tol: float = ZERO_TOL) -> ZeroPattern:
    return ZeroPattern(frozenset(cell for cell in CELLS if c.p[cell] <= tol))


CANONICAL_PATTERNS: dict[ClassLabel, ZeroPattern] = {
    ClassLabel.C1: ZeroPattern.of((0, 0, 0, 0)),
    ClassLabel.C2A: ZeroPattern.of((0, 0, 0, 0), (1, 1, 0, 0)),
    ClassLabel.C2B: ZeroPattern.of((0, 0, 0, 0), (1, 1, 1, 0)),
    ClassLabel.C2C: ZeroPattern.of((0, 0, 0, 0), (1, 0, 1, 1)),
    ClassLabel.C3A: ZeroPattern.of((0, 0, 0, 0), (1, 1, 1, 0), (1, 1, 0, 1)),
    ClassLabel.C3B: ZeroPattern.of((0, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 1)),
    ClassLabel.C4A: ZeroPattern.of((0, 0, 0, 0), (1, 1, 1, 0), (0, 0, 1, 1), (1, 1, 0, 1)),
    ClassLabel.C4B: ZeroPattern.of((1, 0, 0, 0), (0, 1, 0, 0), (1, 0, 1, 1), (0, 1, 1, 1)),
}


def canonical_mask(pattern: ZeroPattern) -> int:
    return min(pattern.relabeled(r).mask() for r in relabeling_group())


@lru_cache(maxsize=1)
def _canonical_lookup() -> dict[int, ClassLabel]:
    return {canonical_mask(p): label for label, p in CANONICAL_PATTERNS.items()}


def has_shared_line(pattern: ZeroPattern) -> bool:
    """Two zeros in one row (fixed y, b) or one column (fixed x, a) of the table."""
    rows, cols = set(), set()
    for a, b, x, y in pattern.cells:
        if (y, b) in rows or (x, a) in cols:
            return True
        rows.add((y, b))
        cols.add((x, a))
    return False


def classify_pattern(pattern: ZeroPattern) -> ClassLabel:
    n = len(pattern)
    if n == 0:
        return ClassLabel.NONE
    if n > 12:
        return ClassLabel.UNPHYSICAL
    if has_shared_line(pattern):
        return ClassLabel.LOCAL_BY_LEMMA1
    label = _canonical_lookup().get(canonical_mask(pattern))
    if label is None:  # exhaustively ruled out in the test-suite
        raise AssertionError(f"zero pattern {sorted(pattern.cells)} fits no class")
    return label


def classify_zero_class(c: Correlation, tol: float = ZERO_TOL) -> ClassLabel:
    return classify_pattern(zero_pattern(c, tol))


def class_orbit(label: ClassLabel) -> list[ZeroPattern]:
    """All relabelings of a class's canonical pattern, without repeats."""
    base = CANONICAL_PATTERNS[ClassLabel.parse(label)]
    seen = {}
    for r in relabeling_group():
        q = base.relabeled(r)
        seen.setdefault(q.mask(), q)
    return list(seen.values())


# ---------------------------------------------------------------- JSON


def correlation_to_json(c: Correlation) -> dict:
    return {"p": c.table().tolist()}


def correlation_from_json(obj, tol: float = ZERO_TOL) -> Correlation:
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "p" not in obj:
        raise InvalidCorrelation('expected an object with a "p" table')
    try:
        table = np.array(obj["p"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidCorrelation(f"unreadable table: {exc}") from None
    if table.shape != (4, 4):
        raise InvalidCorrelation(f"expected a 4x4 table, got shape {table.shape}")
    if np.any(np.isnan(table)):
        raise InvalidCorrelation("NaN entry")
    if table.min() < -tol:
        raise InvalidCorrelation(f"negative entry {table.min()}")
    return Correlation.from_table(table)

