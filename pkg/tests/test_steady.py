import numpy as np
import pytest

from conftest import random_state, random_validated_system
from cyclicdde import (
    GeneNetwork,
    Nonlinearity,
    SystemState,
    UnidirectionalSystem,
    attractor_box,
    equilibrium_gene,
    equilibrium_unidirectional,
    integrate,
)
from cyclicdde.errors import UnsupportedSystemError, ValidationError
from cyclicdde.genenet import repressilator_preset, to_unidirectional


def tanh_pair(gamma=1.0):
    return UnidirectionalSystem(
        [1.0, 1.0],
        (Nonlinearity("tanh_sigmoid", gain=gamma), Nonlinearity("tanh_sigmoid", gain=-gamma)),
        1.0,
    )


class TestEquilibriumUnidirectional:
    def test_tanh_is_exactly_centered(self):
        point, residual = equilibrium_unidirectional(tanh_pair())
        assert np.all(point == 0.0) and residual == 0.0

    def test_reduced_gene_loop_is_centered(self):
        tr = to_unidirectional(repressilator_preset(2.0, nu=2.0))
        _, residual = equilibrium_unidirectional(tr.system)
        assert residual <= 1e-12

    def test_uncentered_system_rejected(self):
        # hill_decreasing takes the value +gain at 0, so the loop is not centered
        system = UnidirectionalSystem(
            [1.0, 1.0],
            (Nonlinearity("tanh_sigmoid", gain=1.0), Nonlinearity("hill_decreasing", gain=1.0)),
            1.0,
        )
        with pytest.raises(ValidationError):
            equilibrium_unidirectional(system)


class TestEquilibriumGene:
    def test_symmetric_repression_cubic_oracle(self):
        # p^3 + p - 1 = 0 root via numpy as the independent oracle
        oracle = [r.real for r in np.roots([1.0, 0.0, 1.0, -1.0]) if abs(r.imag) < 1e-12][0]
        net = repressilator_preset(1.0, nu=2.0)
        r, p, residual = equilibrium_gene(net)
        assert residual <= 1e-12
        assert np.allclose(p, oracle, atol=1e-10)
        assert np.allclose(r, p, atol=1e-12)
        assert oracle == pytest.approx(0.6823278, abs=1e-7)

    def test_single_gene_quadratic_oracle(self):
        net = GeneNetwork([1.0], [1.0], [1.0], [1.0], [1.0], ("decreasing",), [0.5], [0.5])
        r, p, residual = equilibrium_gene(net)
        oracle = (np.sqrt(5.0) - 1.0) / 2.0
        assert r[0] == pytest.approx(oracle, abs=1e-12)
        assert residual <= 1e-12

    def test_random_networks_residual_and_box(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 5))
            dec = 1 if n == 1 else int(rng.choice([1, 3])) if n >= 3 else 1
            kinds = ["increasing"] * n
            for i in rng.choice(n, size=min(dec, n), replace=False):
                kinds[i] = "decreasing"
            if kinds.count("decreasing") % 2 == 0:
                kinds[0] = "decreasing" if kinds[0] == "increasing" else "increasing"
            net = GeneNetwork(
                a=rng.uniform(0.3, 3.0, n),
                b=rng.uniform(0.3, 3.0, n),
                beta=rng.uniform(0.3, 3.0, n),
                c=rng.uniform(0.3, 3.0, n),
                nu=rng.uniform(1.0, 4.0, n),
                f_kind=tuple(kinds),
                tau_p=rng.uniform(0.05, 1.0, n),
                tau_r=rng.uniform(0.05, 1.0, n),
            )
            r, p, residual = equilibrium_gene(net)
            assert residual <= 1e-12
            # attracting-region bounds: r settles under beta/a, and p under
            # (c/b) times the r bound (the plain c/b bound needs beta <= a);
            # strictness can fall below float resolution, hence <=
            assert np.all(r > 0) and np.all(r <= net.beta / net.a)
            assert np.all(p > 0) and np.all(p <= net.c / net.b * (net.beta / net.a))


class TestAttractorBox:
    def test_tanh_pair_endpoints(self):
        box = attractor_box(tanh_pair(1.0))
        t1 = np.tanh(1.0)
        assert box.intervals[0] == pytest.approx((-t1, t1), abs=1e-15)
        assert box.intervals[1] == pytest.approx((-np.tanh(t1), np.tanh(t1)), abs=1e-15)

    def test_endpoints_match_dense_range_sampling(self, rng):
        for _ in range(10):
            system = random_validated_system(rng, N=int(rng.integers(1, 4)))
            box = attractor_box(system)
            # oracle: dense sampling of the scaled-map composition over a wide grid
            x = np.concatenate((-np.geomspace(1e8, 1e-8, 4001), [0.0],
                                np.geomspace(1e-8, 1e8, 4001)))
            g = system.g
            mu = system.mu
            y = g[-1].value(x) / mu[-1]
            for j in range(system.N - 2, -1, -1):
                y = g[j].value(y) / mu[j]
            lo, hi = box.intervals[0]
            assert y.min() >= lo - 1e-9 and y.max() <= hi + 1e-9
            assert y.min() <= lo + 1e-3 * (hi - lo) + 1e-9
            assert y.max() >= hi - 1e-3 * (hi - lo) - 1e-9

    def test_zero_interior_for_centered_systems(self, rng):
        for _ in range(10):
            system = random_validated_system(rng)
            for lo, hi in attractor_box(system).intervals:
                assert lo < 0 < hi

    def test_linear_feedback_rejected(self):
        system = UnidirectionalSystem(
            [1.0], (Nonlinearity("linear_gain", gain=-1.0),), 1.0
        )
        with pytest.raises(UnsupportedSystemError):
            attractor_box(system)

    @pytest.mark.parametrize("beta", [1.0, 4.0])
    def test_reduced_box_refines_translated_gene_bounds(self, beta):
        # the reduced-coordinate box maps back strictly inside the gene-side
        # attracting bounds (it is the sharper of the two enclosures)
        net = repressilator_preset(2.0, nu=2.0, beta=beta)
        tr = to_unidirectional(net)
        box = attractor_box(tr.system)
        for j in range(2 * net.n):
            kind, idx = tr.gene_vars[j]
            r_bound = (net.beta / net.a)[idx]
            hi_gene = r_bound if kind == "r" else (net.c / net.b)[idx] * r_bound
            ends = [tr.signs[j] * (c - tr.equilibrium_shift[j]) for c in (0.0, hi_gene)]
            lo_t, hi_t = min(ends), max(ends)
            lo, hi = box.intervals[j]
            assert lo_t - 1e-12 <= lo and hi <= hi_t + 1e-12

    def test_invariance_by_simulation(self, rng):
        for _ in range(20):
            system = random_validated_system(rng)
            loop = system.loop()
            box = attractor_box(system)
            for _ in range(10):
                u = rng.uniform(0.0, 1.0, loop.n)
                vals = [lo + uu * (hi - lo) for (lo, hi), uu in zip(box.intervals, u)]
                state = SystemState.constant(loop.tau, 16, vals)
                traj = integrate(system, state, 100 * loop.tau, 16)
                for i, (lo, hi) in enumerate(box.intervals):
                    col = traj.values[traj.m:, i]
                    assert col.min() >= lo - 1e-8 and col.max() <= hi + 1e-8

    def test_attraction_from_outside(self, rng):
        for _ in range(5):
            system = random_validated_system(rng)
            loop = system.loop()
            box = attractor_box(system)
            r = box.radius()
            state = random_state(rng, loop.tau, loop.n, m=16, scale=10.0 * r)
            traj = integrate(system, state, 120 * loop.tau, 16)
            k0 = traj.node_index(100 * loop.tau, nearest=True)
            for i, (lo, hi) in enumerate(box.intervals):
                col = traj.values[k0:, i]
                assert col.min() >= lo - 1e-8 and col.max() <= hi + 1e-8
