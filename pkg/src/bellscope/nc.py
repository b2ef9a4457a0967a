"""Words and polynomials in two dichotomic observables per party (O_0^2 = O_1^2 = 1)."""

from __future__ import annotations

from collections import defaultdict
from functools import lru_cache
from typing import Dict, Iterable, Tuple

Word = Tuple[int, ...]
Poly = Dict[Word, float]

EMPTY: Word = ()


@lru_cache(maxsize=None)
def reduce_word(w: Word) -> Word:
    out: list[int] = []
    for letter in w:
        if letter not in (0, 1):
            raise ValueError(f"letters must be 0 or 1, got {letter}")
        if out and out[-1] == letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def adjoint(w: Word) -> Word:
    return tuple(reversed(w))


def words_up_to(length: int) -> list[Word]:
    """All reduced words of length <= length: 1, O0, O1, O0O1, O1O0, ..."""
    out: list[Word] = [EMPTY]
    for n in range(1, length + 1):
        for first in (0, 1):
            out.append(tuple((first + i) % 2 for i in range(n)))
    return out


def poly(terms: Iterable[tuple[Word, float]]) -> Poly:
    out: Poly = defaultdict(float)
    for w, c in terms:
        out[reduce_word(tuple(w))] += c
    return dict(out)


def padd(*ps: Poly, scale: Iterable[float] | None = None) -> Poly:
    scale = list(scale) if scale is not None else [1.0] * len(ps)
    out: Poly = defaultdict(float)
    for p, s in zip(ps, scale):
        for w, c in p.items():
            out[w] += s * c
    return dict(out)


def pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = defaultdict(float)
    for w1, c1 in p.items():
        for w2, c2 in q.items():
            out[reduce_word(w1 + w2)] += c1 * c2
    return dict(out)


def pdag(p: Poly) -> Poly:
    """Adjoint for real coefficients."""
    out: Poly = defaultdict(float)
    for w, c in p.items():
        out[adjoint(w)] += c
    return dict(out)


def degree(p: Poly, tol: float = 0.0) -> int:
    return max((len(w) for w, c in p.items() if abs(c) > tol), default=0)


def pair_key(wa: Word, wb: Word) -> tuple[Word, Word]:
    """Canonical label of <wa x wb> under the real-symmetric identification with its adjoint."""
    wa, wb = reduce_word(wa), reduce_word(wb)
    return min((wa, wb), (adjoint(wa), adjoint(wb)))
