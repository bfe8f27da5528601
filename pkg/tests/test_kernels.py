"""Backend agreement: the compiled kernels must reproduce the reference ones."""

import numpy as np
import pytest

from conftest import random_state, random_validated_system
from cyclicdde._kernels import _ref
from cyclicdde.genenet import repressilator_preset

try:
    from cyclicdde._kernels import _speed
except ImportError:
    _speed = None

needs_speed = pytest.mark.skipif(_speed is None, reason="compiled kernel unavailable")


def _loop_setup(rng):
    system = random_validated_system(rng, N=3)
    loop = system.loop()
    m = 32
    state = random_state(rng, loop.tau, loop.n, m=m).resampled(m)
    n_total = m + 400
    vals = np.zeros((n_total, loop.n))
    ders = np.zeros((n_total, loop.n))
    vals[: m + 1, 0] = state.hist_vals
    ders[: m + 1, 0] = state.hist_ders
    vals[: m + 1, 1:] = state.tail
    codes, pars = loop.kernel_arrays()
    return loop, m, vals, ders, codes, pars, n_total


@needs_speed
def test_loop_kernels_agree_exactly(rng):
    loop, m, vals, ders, codes, pars, n_total = _loop_setup(rng)
    vals2, ders2 = vals.copy(), ders.copy()
    h = loop.tau / m
    r1 = _ref.run_loop_rk4(vals, ders, loop.mu, codes, pars, h, m, m, n_total - 1)
    r2 = _speed.run_loop_rk4(vals2, ders2, loop.mu, codes, pars, h, m, m, n_total - 1)
    assert r1 == r2 == -1
    assert np.array_equal(vals, vals2)
    assert np.array_equal(ders, ders2)


@needs_speed
def test_loop_kernels_agree_on_blowup(rng):
    from cyclicdde import Nonlinearity, UnidirectionalSystem

    system = UnidirectionalSystem([0.0], (Nonlinearity("linear_gain", gain=-30.0),), 1.0)
    loop = system.loop()
    m = 16
    n_total = m + 4000
    codes, pars = loop.kernel_arrays()

    def run(mod):
        vals = np.zeros((n_total, 1))
        ders = np.zeros((n_total, 1))
        vals[: m + 1, 0] = 1.0
        return mod.run_loop_rk4(vals, ders, loop.mu, codes, pars, 1.0 / m, m, m, n_total - 1)

    assert run(_ref) == run(_speed) > 0


@needs_speed
def test_gene_kernels_agree_exactly():
    net = repressilator_preset(2.0, nu=2.0, beta=4.0)
    h = 2.0 / 128
    m_hist = int(round((2.0 / 6.0) / h))
    n_total = m_hist + 2000
    fdec = np.ones(3, dtype=np.int32)

    def run(mod):
        vals = np.zeros((n_total, 6))
        ders = np.zeros((n_total, 6))
        vals[: m_hist + 1] = [0.1, 0.5, 1.0, 0.2, 0.8, 0.3]
        code = mod.run_gene_rk4(
            vals, ders, net.a, net.b, net.beta, net.c, net.nu, fdec,
            net.tau_p / h, net.tau_r / h, h, m_hist, n_total - 1,
        )
        return code, vals, ders

    c1, v1, d1 = run(_ref)
    c2, v2, d2 = run(_speed)
    assert c1 == c2 == -1
    assert np.array_equal(v1, v2)
    assert np.array_equal(d1, d2)
