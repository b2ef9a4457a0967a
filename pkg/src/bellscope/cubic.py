"""Real cubic roots by Cardano's formula, polished with Newton steps."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class CubicPoly:
    """c3 x^3 + c2 x^2 + c1 x + c0, coefficients highest degree first."""

    coeffs: tuple[float, float, float, float]

    def __post_init__(self):
        cs = tuple(float(c) for c in self.coeffs)
        if len(cs) != 4:
            raise ValueError("a cubic needs four coefficients")
        if abs(cs[0]) <= 1e-14 * max(1.0, *map(abs, cs[1:])):
            raise ValueError("leading coefficient is (nearly) zero")
        object.__setattr__(self, "coeffs", cs)

    def __call__(self, x):
        c3, c2, c1, c0 = self.coeffs
        return ((c3 * x + c2) * x + c1) * x + c0

    def derivative(self, x):
        c3, c2, c1, _ = self.coeffs
        return (3 * c3 * x + 2 * c2) * x + c1


def _polish(p: CubicPoly, r: complex, steps: int = 8) -> complex:
    for _ in range(steps):
        d = p.derivative(r)
        if d == 0:
            break
        step = p(r) / d
        if abs(p(r - step)) >= abs(p(r)):
            break  # rounding noise near a multiple root
        r = r - step
        if abs(step) <= 1e-17 * max(1.0, abs(r)):
            break
    return r


def cubic_roots(p: CubicPoly | Sequence[float]) -> list[complex]:
    """All three roots, real ones first in ascending order."""
    if not isinstance(p, CubicPoly):
        p = CubicPoly(tuple(p))
    c3, c2, c1, c0 = p.coeffs
    a, b, c = c2 / c3, c1 / c3, c0 / c3
    # depressed cubic t^3 + q t + r with x = t - a/3
    q = b - a * a / 3
    r = 2 * a**3 / 27 - a * b / 3 + c
    shift = -a / 3
    disc = (r / 2) ** 2 + (q / 3) ** 3
    scale = max((r / 2) ** 2, abs(q / 3) ** 3, 1e-300)
    if abs(disc) <= 1e-12 * scale:
        # repeated root; Cardano loses half the digits here
        if abs(q) <= 1e-12 * max(1.0, abs(a) ** 2):
            roots = [shift] * 3
        else:
            roots = [3 * r / q + shift, -1.5 * r / q + shift, -1.5 * r / q + shift]
    elif disc < 0:
        # three distinct real roots
        m = 2 * math.sqrt(-q / 3)
        arg = max(-1.0, min(1.0, 3 * r / (q * m)))
        theta = math.acos(arg) / 3
        roots = [m * math.cos(theta - 2 * math.pi * k / 3) + shift for k in range(3)]
    else:
        s = math.sqrt(disc)
        u = math.copysign(abs(-r / 2 + s) ** (1 / 3), -r / 2 + s)
        v = math.copysign(abs(-r / 2 - s) ** (1 / 3), -r / 2 - s)
        w = cmath.exp(2j * math.pi / 3)
        roots = [u + v + shift, u * w + v * w.conjugate() + shift, u * w.conjugate() + v * w + shift]
    polished = [_polish(p, complex(z)) for z in roots]
    out = []
    for z in polished:
        out.append(z.real if abs(z.imag) <= 1e-12 * max(1.0, abs(z)) else z)
    real = sorted(z for z in out if not isinstance(z, complex))
    cplx = [z for z in out if isinstance(z, complex)]
    return real + cplx


def smallest_positive_root(p: CubicPoly | Sequence[float]) -> float:
    pos = [z for z in cubic_roots(p) if not isinstance(z, complex) and z > 0]
    if not pos:
        raise ValueError("cubic has no positive real root")
    return float(min(pos))
