import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bellscope.qstrategy import PureState, Strategy, xz_observable

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_unitary(rng, d=2):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_observable(rng, d=2, real=False):
    """Random dichotomic observable (eigenvalues +-1, random rank)."""
    if real and d == 2:
        t = rng.uniform(0, 2 * np.pi)
        return xz_observable(np.sin(t), np.cos(t))
    u = random_unitary(rng, d)
    signs = rng.choice([-1.0, 1.0], size=d)
    return u @ np.diag(signs) @ u.conj().T


def random_qubit_strategy(rng, real=False):
    if real:
        psi = rng.normal(size=4)
    else:
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    state = PureState.normalized(psi)
    # rank-1 projective qubit observables
    obs = []
    for _ in range(4):
        if real:
            obs.append(random_observable(rng, real=True))
        else:
            v = rng.normal(size=3)
            v /= np.linalg.norm(v)
            obs.append(np.array([[v[2], v[0] - 1j * v[1]], [v[0] + 1j * v[1], -v[2]]]))
    return Strategy.from_observables(state, obs[:2], obs[2:])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria record (number, passed, detail) here; printed after the run
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
