"""Strategy families for every zero class, closed-form constants and named points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .corrgeom import ClassLabel, Correlation, mix, pr_box, uniform
from .cubic import smallest_positive_root
from .qstrategy import (
    SX,
    SZ,
    Povm,
    PureState,
    Strategy,
    StrategyParams,
    born,
    xz_observable,
)

CONSTRAINT_TOL = 1e-9
DEGENERACY_TOL = 1e-9

# cubic polynomials whose smallest positive roots fix the one-zero optimum
P1 = (1.0, -9.0, -1.0, 1.0)
P2 = (7.0, -35.0, 21.0, -1.0)
P3 = (1.0, 26.0, -36.0, -104.0)


class ConstraintViolation(ValueError):
    pass


class DegenerateParameters(ValueError):
    pass


@dataclass(frozen=True)
class NamedConstants:
    nu: float
    tau: float
    theta0: float
    alpha0: float
    kappa1: float
    kappa2: float
    kappa3: float
    xi1: float
    xi2: float
    xi3: float
    mu1: float
    mu2: float
    mu3: float
    mu_plus: float
    mu_minus: float
    k1: float
    k2: float
    k3: float
    cabello_alpha: float
    cabello_theta: float
    cabello_phi: float
    hardy_angle: float
    hardy_theta: float


@lru_cache(maxsize=None)
def named_constants() -> NamedConstants:
    cbrt = np.cbrt
    s33, s78 = math.sqrt(33), math.sqrt(78)
    nu = math.sqrt(5) - 2
    tau = float(cbrt(17 + 3 * s33))
    t0 = (tau - 1 - 2 / tau) / 3  # tan(theta0), the real root of t^3 + t^2 + t - 1
    theta0 = math.atan(t0)
    alpha0 = math.atan(math.sqrt(t0))
    kappa1 = 0.5 * ((tau * tau - tau - 2) / (3 * tau)) ** 3
    kappa2 = (1 - math.cos(2 * alpha0)) / (2 / math.cos(theta0) ** 2)
    kappa3 = (1 - 2 * kappa1 - 2 * kappa2) / 2
    mu1 = float(cbrt(53 - 6 * s78))
    mu2 = float(cbrt(67 * s78 - 414))
    mu3 = float(cbrt(307 + 39 * s78))
    mup = float(cbrt(359 + 12 * s78))
    mum = float(cbrt(359 - 12 * s78))
    k1 = (4 - (mu1 * mu1 + 1) / mu1) / 6
    k2 = math.sqrt(1 - 31 * float(cbrt(36)) / (12 * mu2) + float(cbrt(6)) * mu2 / 12)
    k3 = ((mu3 * mu3 - 29) / mu3 - 2) / 6
    ca = math.atan(math.sqrt((mup + mum - 1) / 12))
    cb = math.pi / 2 - ca
    ct = math.atan((k2 * k2 - k1 * k3) / (k2 * k2 + k3 * k3))
    cp = math.atan(math.sin(ct) / math.tan(cb) - math.tan(ca) * math.cos(ct))
    h = 0.5 * math.atan(-2 * math.sqrt(math.sqrt(5) + 2))
    return NamedConstants(
        nu=nu, tau=tau, theta0=theta0, alpha0=alpha0,
        kappa1=kappa1, kappa2=kappa2, kappa3=kappa3,
        xi1=smallest_positive_root(P1), xi2=smallest_positive_root(P2),
        xi3=smallest_positive_root(P3),
        mu1=mu1, mu2=mu2, mu3=mu3, mu_plus=mup, mu_minus=mum,
        k1=k1, k2=k2, k3=k3,
        cabello_alpha=ca, cabello_theta=ct, cabello_phi=cp,
        hardy_angle=h, hardy_theta=math.atan(math.tan(h) / math.sin(h)),
    )


# ---------------------------------------------------------------- state forms


def _rot(angle: float, sign: float = -1.0) -> np.ndarray:
    """cos(2a) sz + sign * sin(2a) sx."""
    return xz_observable(math.cos(2 * angle), sign * math.sin(2 * angle))


def _real_state(amps) -> PureState:
    return PureState(np.asarray(amps, dtype=complex))


def class4b_form(theta, alpha, beta) -> Strategy:
    psi = _real_state([math.cos(theta), 0, 0, math.sin(theta)])
    return Strategy.from_observables(psi, [SZ, _rot(alpha)], [SZ, _rot(beta)])


def class2b_form(theta, alpha, beta) -> Strategy:
    """Three-parameter form shared by the 2b and 3a classes."""
    s, c = math.sin(theta), math.cos(theta)
    psi = _real_state([0, s * math.cos(alpha), c, -s * math.sin(alpha)])
    return Strategy.from_observables(psi, [SZ, _rot(alpha)], [SZ, _rot(beta)])


def class3b_form(theta, alpha, beta) -> Strategy:
    psi = _real_state([0, math.cos(theta), math.sin(theta), 0])
    b1 = xz_observable(-math.cos(2 * beta), -math.sin(2 * beta))
    return Strategy.from_observables(psi, [SZ, _rot(alpha)], [SZ, b1])


def class2a_form(theta, alpha, beta) -> Strategy:
    """The 3b form after the local basis change sz (x) sx."""
    psi = _real_state([math.cos(theta), 0, 0, -math.sin(theta)])
    return Strategy.from_observables(psi, [SZ, _rot(alpha, +1.0)], [-SZ, _rot(beta)])


def class1_form(theta, alpha, beta, phi) -> Strategy:
    cp = math.cos(phi)
    psi = _real_state([0, cp * math.cos(theta), cp * math.sin(theta), math.sin(phi)])
    return Strategy.from_observables(psi, [SZ, _rot(alpha)], [SZ, _rot(beta)])


def class1_symmetric(theta, alpha) -> Strategy:
    """Permutation-invariant one-zero strategy."""
    s = math.sin(theta) / math.sqrt(2)
    psi = _real_state([0, s, s, math.cos(theta)])
    a1 = xz_observable(math.cos(alpha), math.sin(alpha))
    return Strategy.from_observables(psi, [SZ, a1], [SZ, a1])


def class3b_unitaries(p: StrategyParams) -> tuple[np.ndarray, np.ndarray]:
    """Basis changes whose columns are the setting-1 eigenbases, in the setting-0 basis."""
    ca, sa = math.cos(p.alpha), math.sin(p.alpha)
    cb, sb = math.cos(p.beta), math.sin(p.beta)
    e = lambda t: complex(math.cos(t), math.sin(t))
    uA = np.array([[e(p.gamma_A) * ca, e(p.omega_A) * sa],
                   [-e(-p.omega_A) * sa, e(-p.gamma_A) * ca]])
    uB = np.array([[-e(-p.omega_B) * sb, e(-p.gamma_B) * cb],
                   [e(p.gamma_B) * cb, e(p.omega_B) * sb]])
    return uA, uB


def class3b_general(p: StrategyParams) -> Strategy:
    """Most general qubit strategy with the two same-block zeros of the 3b pattern."""
    psi = PureState(np.array([0, math.cos(p.theta), np.exp(1j * p.phi) * math.sin(p.theta), 0]))
    uA, uB = class3b_unitaries(p)
    a1 = uA @ SZ @ uA.conj().T
    b1 = uB @ SZ @ uB.conj().T
    return Strategy.from_observables(psi, [SZ, a1], [SZ, b1])


def class3b_zeta(p: StrategyParams) -> float:
    return math.cos(p.gamma_A + p.gamma_B + p.omega_A + p.omega_B + p.phi)


# ---------------------------------------------------------------- constraints


def constraint_residual(label: ClassLabel, p: StrategyParams) -> float:
    th, a, b, ph = p.theta, p.alpha, p.beta, p.phi
    s, c = math.sin, math.cos
    if label is ClassLabel.C4B:
        sign = 1.0 if s(2 * th) > 0 else -1.0
        return abs(c(2 * th)) + abs(s(b - sign * a))
    if label is ClassLabel.C3A:
        return abs(c(th) * s(b) - s(th) * s(a) * c(b))
    if label is ClassLabel.C3B:
        return abs(c(th) * s(a) * c(b) - s(th) * c(a) * s(b))
    if label is ClassLabel.C2C:
        return abs(-c(ph) * c(th) * s(a) * s(b) + c(ph) * s(th) * c(a) * c(b) - s(ph) * c(a) * s(b))
    return 0.0


def _on_axis(angle: float) -> bool:
    """True when angle is (numerically) a multiple of pi/2."""
    return abs(math.sin(2 * angle)) <= DEGENERACY_TOL


def constrained_theta(label, alpha: float, beta: float) -> float:
    label = ClassLabel.parse(label)
    if label is ClassLabel.C3A:
        return math.atan(math.tan(beta) / math.sin(alpha))
    if label is ClassLabel.C3B:
        return math.atan(math.tan(alpha) / math.tan(beta))
    raise ValueError(f"class {label.value} has no theta constraint")


def constrained_phi(theta: float, alpha: float, beta: float) -> float:
    return math.atan(math.sin(theta) / math.tan(beta) - math.tan(alpha) * math.cos(theta))


FAMILY_LABELS = ("4b", "3a", "3b", "2a", "2b", "2c", "1")


def family(label, params: StrategyParams) -> Strategy:
    """Strategy of the given class's parametric family."""
    label = ClassLabel.parse(label)
    p = params
    if label.value not in FAMILY_LABELS:
        raise ValueError(f"no strategy family for class {label.value}")
    if label in (ClassLabel.C3A, ClassLabel.C3B, ClassLabel.C2C):
        if any(_on_axis(v) for v in (p.theta, p.alpha, p.beta)):
            raise DegenerateParameters("theta, alpha and beta must avoid multiples of pi/2")
    if label is ClassLabel.C4B and _on_axis(p.alpha):
        raise DegenerateParameters("alpha must avoid multiples of pi/2")
    res = constraint_residual(label, p)
    if res > CONSTRAINT_TOL:
        raise ConstraintViolation(f"class {label.value} constraint violated by {res:.3g}")
    if label is ClassLabel.C4B:
        return class4b_form(p.theta, p.alpha, p.beta)
    if label in (ClassLabel.C3A, ClassLabel.C2B):
        return class2b_form(p.theta, p.alpha, p.beta)
    if label is ClassLabel.C3B:
        return class3b_form(p.theta, p.alpha, p.beta)
    if label is ClassLabel.C2A:
        return class2a_form(p.theta, p.alpha, p.beta)
    return class1_form(p.theta, p.alpha, p.beta, p.phi)


# ---------------------------------------------------------------- named points


def hardy_params() -> StrategyParams:
    k = named_constants()
    return StrategyParams(theta=k.hardy_theta, alpha=k.hardy_angle, beta=k.hardy_angle)


def q_params() -> StrategyParams:
    k = named_constants()
    return StrategyParams(theta=k.theta0, alpha=k.alpha0, beta=math.pi / 2 - k.alpha0)


def q2_params() -> StrategyParams:
    return StrategyParams(theta=-math.pi / 4, alpha=5 * math.pi / 6, beta=-2 * math.pi / 3)


def q3_params() -> StrategyParams:
    return StrategyParams(theta=math.pi / 4, alpha=math.pi / 6, beta=math.pi / 4)


def cabello_params() -> StrategyParams:
    k = named_constants()
    return StrategyParams(theta=k.cabello_theta, alpha=k.cabello_alpha,
                          beta=math.pi / 2 - k.cabello_alpha, phi=k.cabello_phi)


def q4_angles() -> tuple[float, float]:
    k = named_constants()
    return math.acos(math.sqrt(k.xi2)), math.acos(k.xi1)


def q4_params() -> StrategyParams:
    """Class-1 family parameters that reproduce the symmetric one-zero optimum."""
    th, al = q4_angles()
    return StrategyParams(theta=math.pi / 4, alpha=-al / 2, beta=-al / 2, phi=math.pi / 2 - th)


def cabello_reference() -> Strategy:
    """Symmetric-amplitude form k1|00> + k2(|01> + |10>) + k3|11> of the 2c optimum."""
    k = named_constants()
    a = k.cabello_alpha
    psi = _real_state([k.k1, k.k2, k.k2, k.k3])
    obs = xz_observable(math.cos(2 * a), -math.sin(2 * a))
    return Strategy.from_observables(psi, [-SZ, -obs], [obs, -SZ])


def tsirelson_strategy(flip_alice: bool = False) -> Strategy:
    r = 1 / math.sqrt(2)
    sgn = -1.0 if flip_alice else 1.0
    psi = _real_state([r, 0, 0, r])
    return Strategy.from_observables(psi, [sgn * SZ, sgn * SX],
                                     [xz_observable(-r, -r), xz_observable(-r, r)])


NAMED_POINTS = ("hardy", "q", "q2", "q3", "cabello", "q4", "pr", "pr2", "chsh", "chsh2", "uniform")
QUANTUM_REFERENCES = ("hardy", "q", "q2", "q3", "cabello", "q4")

REFERENCE_CLASS = {"hardy": "3a", "q": "3b", "q2": "2a", "q3": "2b", "cabello": "2c", "q4": "1"}


def named_strategy(name: str) -> Optional[Strategy]:
    name = name.lower()
    if name == "hardy":
        return family("3a", hardy_params())
    if name == "q":
        return family("3b", q_params())
    if name == "q2":
        return family("2a", q2_params())
    if name == "q3":
        return family("2b", q3_params())
    if name == "cabello":
        return cabello_reference()
    if name == "q4":
        return class1_symmetric(*q4_angles())
    if name in ("chsh", "chsh2"):
        return tsirelson_strategy(name == "chsh2")
    if name == "uniform":
        return Strategy.from_observables(_real_state([1, 0, 0, 0]), [SX, SX], [SX, SX])
    if name in ("pr", "pr2"):
        return None
    raise KeyError(f"unknown named point {name!r}")


def named_point(name: str) -> tuple[Optional[Strategy], Correlation]:
    name = name.lower()
    if name not in NAMED_POINTS:
        raise KeyError(f"unknown named point {name!r}")
    s = named_strategy(name)
    if name == "pr":
        return None, pr_box(0, 0, 1)
    if name == "pr2":
        return None, pr_box(0, 0, 0)
    if name in ("chsh", "chsh2"):
        box = pr_box(0, 0, 1 if name == "chsh" else 0)
        w = 1 / math.sqrt(2)
        return s, mix([(w, box), (1 - w, uniform())])
    if name == "uniform":
        return s, uniform()
    return s, born(s)


# ---------------------------------------------------------------- noisy strategy


def noisy_class2a(eps: float) -> Strategy:
    """Bell-state 2a optimum with Alice's first outcome of setting 0 damped by (1 - eps)."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie strictly between 0 and 1")
    s = named_strategy("q2")
    m0 = s.measA[0]
    e0 = (1 - eps) * m0[0]
    noisy = Povm((e0, np.eye(2) - e0))
    return Strategy(s.state, (noisy, s.measA[1]), s.measB)
