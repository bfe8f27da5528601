"""Benchmark: compiled stepping kernel vs the pure-Python fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cyclicdde import Nonlinearity, SystemState, UnidirectionalSystem, repressilator_preset
from cyclicdde._kernels import _ref

try:
    from cyclicdde._kernels import _speed
except ImportError:
    _speed = None


def time_loop(kernel, n_reps=3):
    gamma = 2.0
    system = UnidirectionalSystem(
        [1.0, 1.0],
        (Nonlinearity("tanh_sigmoid", gain=gamma), Nonlinearity("tanh_sigmoid", gain=-gamma)),
        1.0,
    )
    loop = system.loop()
    m = 256
    t_end = 200.0
    state = SystemState.constant(1.0, m, [0.4, -0.2])
    codes, pars = loop.kernel_arrays()
    n_total = m + int(np.ceil(t_end * m)) + 1
    best = np.inf
    for _ in range(n_reps):
        vals = np.zeros((n_total, 2))
        ders = np.zeros((n_total, 2))
        vals[: m + 1, 0] = state.hist_vals
        ders[: m + 1, 0] = state.hist_ders
        vals[: m + 1, 1:] = state.tail
        t0 = time.perf_counter()
        kernel.run_loop_rk4(vals, ders, loop.mu, codes, pars, 1.0 / m, m, m, n_total - 1)
        best = min(best, time.perf_counter() - t0)
    steps = n_total - 1 - m
    return best, steps, vals


def time_gene(kernel, n_reps=3):
    network = repressilator_preset(3.0, nu=2.0, beta=4.0)
    h = 3.0 / 256
    m_hist = int(round((3.0 / 6) / h))
    n_total = m_hist + int(np.ceil(150.0 / h)) + 1
    fdec = np.ones(3, dtype=np.int32)
    best = np.inf
    for _ in range(n_reps):
        vals = np.zeros((n_total, 6))
        ders = np.zeros((n_total, 6))
        vals[: m_hist + 1] = 0.3
        t0 = time.perf_counter()
        kernel.run_gene_rk4(
            vals, ders, network.a, network.b, network.beta, network.c, network.nu,
            fdec, network.tau_p / h, network.tau_r / h, h, m_hist, n_total - 1,
        )
        best = min(best, time.perf_counter() - t0)
    return best, n_total - 1 - m_hist, vals


def main():
    print(f"{'kernel':<22}{'backend':<12}{'steps':>10}{'time':>12}{'steps/s':>14}")
    rows = [("loop rk4", time_loop), ("gene rk4", time_gene)]
    for name, fn in rows:
        results = {}
        for label, mod in (("python", _ref), ("compiled", _speed)):
            if mod is None:
                continue
            t, steps, vals = fn(mod)
            results[label] = (t, steps, vals)
            print(f"{name:<22}{label:<12}{steps:>10}{t:>11.4f}s{steps / t:>14.0f}")
        if len(results) == 2:
            tp, _, vp = results["python"]
            tc, _, vc = results["compiled"]
            agree = np.max(np.abs(vp - vc))
            print(f"{'':<22}speedup x{tp / tc:<8.1f} max |diff| = {agree:.3e}")


if __name__ == "__main__":
    main()
