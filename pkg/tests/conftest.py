import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np
import pytest

from cyclicdde import Nonlinearity, SystemState, UnidirectionalSystem


def random_validated_system(rng, N=None, bounded=True):
    """Random zero-centered negative-feedback loop that passes validation."""
    N = int(rng.integers(1, 5)) if N is None else N
    mu = rng.uniform(0.3, 1.5, N)
    tau = float(rng.uniform(0.6, 1.6))
    nls = []
    for _ in range(max(N - 1, 0)):
        kind = rng.choice(["tanh_sigmoid", "hill_increasing", "shifted_hill"])
        gain = float(rng.uniform(0.5, 2.0))
        slope = float(rng.uniform(0.5, 2.0))
        if kind == "shifted_hill":
            nls.append(Nonlinearity(kind, gain, slope, nu=float(rng.uniform(1.0, 3.0)),
                                    shift=float(rng.uniform(0.2, 1.5))))
        elif kind == "hill_increasing":
            nls.append(Nonlinearity(kind, gain, slope, nu=float(rng.uniform(1.0, 3.0))))
        else:
            nls.append(Nonlinearity(kind, gain, slope))
    last_kind = rng.choice(["tanh_sigmoid", "shifted_hill"])
    gain = -float(rng.uniform(0.5, 2.0))
    if last_kind == "shifted_hill":
        nls.append(Nonlinearity(last_kind, gain, 1.0, nu=2.0,
                                shift=float(rng.uniform(0.2, 1.5))))
    else:
        nls.append(Nonlinearity(last_kind, gain, float(rng.uniform(0.5, 2.0))))
    return UnidirectionalSystem(mu, tuple(nls), tau)


def random_state(rng, tau, n_components, m=64, scale=1.0):
    """Smooth random history (low-order Fourier) plus a random tail."""
    k = np.arange(1, 4)
    a = rng.normal(size=3) * scale / k
    b = rng.uniform(0, 2 * np.pi, 3)
    w = k * np.pi / tau
    theta = np.linspace(-tau, 0.0, m + 1)
    vals = (a * np.cos(np.outer(theta, w) + b)).sum(axis=1)
    ders = (-a * w * np.sin(np.outer(theta, w) + b)).sum(axis=1)
    tail = rng.normal(size=n_components - 1) * scale
    return SystemState(tau, vals, ders, tail)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
