import numpy as np
import pytest

from cyclicdde import (
    Nonlinearity,
    SystemState,
    UnidirectionalSystem,
    integrate,
    integrate_gene,
    model_system,
)
from cyclicdde.errors import DivergenceError, DomainError, InputError
from cyclicdde.genenet import repressilator_preset
from cyclicdde.steady import equilibrium_gene


def tanh_pair(gamma=1.0):
    return UnidirectionalSystem(
        [1.0, 1.0],
        (Nonlinearity("tanh_sigmoid", gain=gamma), Nonlinearity("tanh_sigmoid", gain=-gamma)),
        1.0,
    )


class TestModelSystem:
    def test_scalar_case_is_pure_delay(self):
        # N = 0, J = 1: dx = -(pi/2) x(t - 1)
        ms = model_system(0, 1)
        assert ms.system.mu[0] == 0.0
        assert float(ms.system.next_nl[0].derivative(0.0)) == pytest.approx(-np.pi / 2, abs=0)

    def test_even_j_rejected(self):
        with pytest.raises(InputError):
            model_system(1, 2)

    def test_exact_solution_satisfies_system(self):
        # direct substitution at 100 random (t, j)
        ms = model_system(2, 3)
        loop = ms.system.loop()
        rng = np.random.default_rng(1)
        for _ in range(100):
            t = float(rng.uniform(0.0, 6.0))
            x = ms.exact(t)
            xd = ms.exact_component(t - 1.0, 0)
            rhs = loop.rhs(x, xd)
            exact_rhs = -ms.omega * np.sin(ms.omega * t + np.arange(3) * ms.phi)
            assert np.max(np.abs(rhs - exact_rhs)) < 1e-12 * ms.omega

    def test_initial_tail_positive(self):
        for N, J in [(1, 1), (2, 3), (4, 5)]:
            ms = model_system(N, J)
            st = ms.exact_state(0.0, 64)
            assert np.all(st.tail > 0)
            assert np.allclose(st.tail, np.cos(np.arange(1, N + 1) * ms.phi))


class TestIntegrate:
    def test_zero_state_stays_zero(self):
        traj = integrate(tanh_pair(), SystemState.constant(1.0, 16, [0.0, 0.0]), 10.0, 16)
        assert np.max(np.abs(traj.values)) == 0.0

    def test_model_accuracy_m128(self):
        ms = model_system(1, 1)
        traj = integrate(ms.system, ms.exact_state(0.0, 128), 10.0, 128)
        ts = traj.times[traj.m:]
        err = np.max(np.abs(traj.values[traj.m:] - ms.exact(ts)))
        assert err <= 1e-6

    def test_convergence_order(self):
        ms = model_system(2, 3)
        errs = []
        for m in (64, 128, 256, 512):
            traj = integrate(ms.system, ms.exact_state(0.0, m), 10.0, m)
            ts = traj.times[traj.m:]
            errs.append(np.max(np.abs(traj.values[traj.m:] - ms.exact(ts))))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders >= 3.5)

    def test_self_consistency_residual(self):
        system = tanh_pair(1.4)
        traj = integrate(system, SystemState.constant(1.0, 32, [0.4, -0.1]), 5.0, 32)
        loop = system.loop()
        scale = np.max(np.abs(traj.derivatives[traj.m:]))
        for k in range(traj.m, traj.values.shape[0], 7):
            rhs = loop.rhs(traj.values[k], traj.values[k - traj.m, 0])
            assert np.max(np.abs(rhs - traj.derivatives[k])) <= 1e-12 * scale

    def test_state_at_nodes_exact(self):
        system = tanh_pair(1.2)
        st0 = SystemState.constant(1.0, 32, [0.3, 0.2])
        traj = integrate(system, st0, 6.0, 32)
        assert np.array_equal(traj.state_at(0.0).hist_vals, st0.hist_vals)
        t_node = 64 * traj.h
        st = traj.state_at(t_node)
        k = traj.node_index(t_node)
        assert np.array_equal(st.hist_vals, traj.values[k - 32: k + 1, 0])

    def test_state_at_matches_exact_solution(self):
        ms = model_system(1, 1)
        traj = integrate(ms.system, ms.exact_state(0.0, 128), 5.0, 128)
        st = traj.state_at(2.5)
        theta = np.linspace(1.5, 2.5, 129)
        assert np.max(np.abs(st.hist_vals - np.cos(ms.omega * theta))) < 1e-6

    def test_state_at_out_of_range(self):
        traj = integrate(tanh_pair(), SystemState.constant(1.0, 16, [0.1, 0.0]), 2.0, 16)
        with pytest.raises(DomainError):
            traj.state_at(3.0)

    def test_m_minimum(self):
        with pytest.raises(InputError):
            integrate(tanh_pair(), SystemState.constant(1.0, 4, [0.1, 0.0]), 1.0, 4)

    def test_divergence_detected(self):
        system = UnidirectionalSystem(
            [0.0], (Nonlinearity("linear_gain", gain=-40.0),), 1.0
        )
        with pytest.raises(DivergenceError) as err:
            integrate(system, SystemState.constant(1.0, 16, [1.0]), 400.0, 16)
        assert err.value.blowup_time is not None

    def test_equilibrium_fixed_50_delays(self, rng):
        system = tanh_pair(1.7)
        traj = integrate(system, SystemState.constant(1.0, 32, [0.0, 0.0]), 50.0, 32)
        assert np.max(np.abs(traj.values)) <= 1e-10

    def test_point_dissipativity(self):
        # bounded couplings, positive decay: large data enters a fixed ball
        system = tanh_pair(2.0)
        bound = (2.0 + 1.0) / 1.0
        st = SystemState.constant(1.0, 32, [1e3, -1e3])
        traj = integrate(system, st, 40.0, 32)
        tail_nodes = traj.values[traj.node_index(20.0):]
        assert np.max(np.abs(tail_nodes)) <= bound

    def test_extend_matches_single_run(self):
        system = tanh_pair(1.9)
        st = SystemState.constant(1.0, 32, [0.5, -0.4])
        one = integrate(system, st, 12.0, 32)
        two = integrate(system, st, 5.0, 32)
        two.extend(12.0)
        assert np.array_equal(one.values, two.values[: one.values.shape[0]])


class TestGeneIntegration:
    def test_constant_at_equilibrium(self):
        net = repressilator_preset(1.5, nu=2.0)
        r, p, _ = equilibrium_gene(net)
        traj = integrate_gene(net, np.concatenate([r, p]), 30.0, 128)
        drift = np.max(np.abs(traj.values - np.concatenate([r, p])))
        assert drift <= 1e-10

    def test_zero_start_turns_positive(self):
        net = repressilator_preset(1.2, nu=2.0)
        traj = integrate_gene(net, np.zeros(6), 10.0, 64)
        k = traj.values.shape[0] - 1
        assert np.all(traj.values[k] > 0)

    def test_nonnegativity(self, rng):
        net = repressilator_preset(2.0, nu=2.0, beta=4.0)
        init = rng.uniform(0.0, 3.0, 6)
        traj = integrate_gene(net, init, 60.0, 64)
        assert np.min(traj.values) >= -1e-12

    def test_eventually_inside_box(self, rng):
        net = repressilator_preset(2.0, nu=2.0)
        init = rng.uniform(0.0, 5.0, 6)
        traj = integrate_gene(net, init, 80.0, 64)
        k0 = int(np.searchsorted(traj.times, 40.0))
        r_bound = net.beta / net.a
        p_bound = net.c / net.b
        vals = traj.values[k0:]
        assert np.all(vals[:, :3] < r_bound + 1e-9)
        assert np.all(vals[:, 3:] < p_bound + 1e-9)
        assert np.all(vals > 0)

    def test_negative_initial_rejected(self):
        net = repressilator_preset(1.0)
        with pytest.raises(InputError):
            integrate_gene(net, [-0.1, 1, 1, 1, 1, 1], 1.0, 64)

    def test_callable_histories(self):
        net = repressilator_preset(1.0, nu=2.0)
        fns = [lambda t, s=s: 0.5 + 0.1 * np.cos(t + s) for s in range(6)]
        traj = integrate_gene(net, fns, 5.0, 64)
        assert traj.t_end >= 5.0
        assert abs(traj.value(0.0, 2) - fns[2](0.0)) < 1e-12
