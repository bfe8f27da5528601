import numpy as np
import pytest

from cyclicdde import (
    GeneNetwork,
    hill,
    hill_derivative,
    integrate,
    integrate_gene,
    repressilator_preset,
    to_unidirectional,
    validate_feedback,
)
from cyclicdde.errors import DomainError, InputError, ValidationError
from cyclicdde.steady import equilibrium_gene
from cyclicdde.systems import SystemState


P_STAR_NU2 = 0.6823278038280193  # real root of p^3 + p - 1 (numpy.roots oracle)


class TestHill:
    def test_values_at_zero_and_one(self):
        for nu in (1.0, 2.0, 3.7):
            assert hill(0.0, nu, "decreasing") == 1.0
            assert hill(0.0, nu, "increasing") == 0.0
            assert hill(1.0, nu, "decreasing") == 0.5
            assert hill(1.0, nu, "increasing") == 0.5

    def test_derivative_at_equilibrium(self):
        # frozen from the analytic formula at the cubic-root equilibrium
        d = hill_derivative(P_STAR_NU2, 2.0, "decreasing")
        expect = -2.0 * P_STAR_NU2 / (1.0 + P_STAR_NU2**2) ** 2
        assert d == pytest.approx(expect, rel=1e-14)
        assert d == pytest.approx(-0.6353, abs=1e-4)

    def test_negative_argument_rejected(self):
        with pytest.raises(DomainError):
            hill(-0.5, 2.0, "decreasing")
        with pytest.raises(DomainError):
            hill_derivative(-0.5, 2.0, "increasing")

    def test_derivative_matches_finite_difference(self):
        x = np.linspace(0.05, 4.0, 30)
        h = 1e-7
        for kind in ("increasing", "decreasing"):
            fd = (hill(x + h, 2.5, kind) - hill(x - h, 2.5, kind)) / (2 * h)
            assert np.allclose(hill_derivative(x, 2.5, kind), fd, rtol=1e-6, atol=1e-9)


class TestPreset:
    def test_structure(self):
        net = repressilator_preset(3.0, nu=2.0)
        assert net.n == 3
        assert sum(k == "decreasing" for k in net.f_kind) == 3
        assert net.total_delay == pytest.approx(3.0, abs=1e-15)

    def test_equilibrium_value(self):
        _, p, _ = equilibrium_gene(repressilator_preset(1.0, nu=2.0))
        assert np.allclose(p, P_STAR_NU2, atol=1e-8)

    def test_bad_delay(self):
        with pytest.raises(InputError):
            repressilator_preset(0.0)


class TestTransform:
    def test_decay_rates_follow_reversed_indexing(self):
        net = GeneNetwork(
            a=[1.0, 2.0, 3.0],
            b=[4.0, 5.0, 6.0],
            beta=[1.0, 1.0, 1.0],
            c=[1.0, 1.0, 1.0],
            nu=[2.0, 2.0, 2.0],
            f_kind=("decreasing",) * 3,
            tau_p=[0.5] * 3,
            tau_r=[0.5] * 3,
        )
        tr = to_unidirectional(net)
        T = net.total_delay
        # odd positions carry protein decays, even positions mRNA decays,
        # both walking the gene index backwards
        assert np.allclose(tr.system.mu, T * np.array([6.0, 3.0, 5.0, 2.0, 4.0, 1.0]))
        assert tr.system.tau == 1.0

    def test_symmetric_loop_gain(self):
        for T in (0.5, 1.0, 3.0):
            tr = to_unidirectional(repressilator_preset(T, nu=2.0))
            fprime = abs(hill_derivative(P_STAR_NU2, 2.0, "decreasing"))
            assert tr.loop_gain == pytest.approx(T**6 * fprime**3, rel=1e-10)
            assert np.allclose(tr.system.mu, T)

    def test_reduction_is_zero_centered_and_valid(self):
        for beta in (1.0, 4.0):
            tr = to_unidirectional(repressilator_preset(1.7, nu=2.0, beta=beta))
            assert tr.system.zero_centered
            assert validate_feedback(tr.system).passed

    def test_mixed_kind_network(self):
        net = GeneNetwork(
            a=[1.0, 1.5],
            b=[0.8, 1.2],
            beta=[2.0, 1.0],
            c=[1.0, 0.5],
            nu=[2.0, 3.0],
            f_kind=("decreasing", "increasing"),
            tau_p=[0.4, 0.6],
            tau_r=[0.3, 0.2],
        )
        tr = to_unidirectional(net)
        assert validate_feedback(tr.system).passed
        _, _, residual = equilibrium_gene(net)
        assert residual <= 1e-12

    def test_even_decreasing_count_rejected(self):
        with pytest.raises(ValidationError):
            GeneNetwork(
                a=[1.0, 1.0],
                b=[1.0, 1.0],
                beta=[1.0, 1.0],
                c=[1.0, 1.0],
                nu=[2.0, 2.0],
                f_kind=("decreasing", "decreasing"),
                tau_p=[0.5, 0.5],
                tau_r=[0.5, 0.5],
            )

    @pytest.mark.parametrize(
        "net",
        [
            repressilator_preset(2.5, nu=2.0, beta=1.0),
            GeneNetwork(
                a=[1.0, 1.5],
                b=[0.8, 1.2],
                beta=[2.0, 1.0],
                c=[1.0, 0.5],
                nu=[2.0, 3.0],
                f_kind=("decreasing", "increasing"),
                tau_p=[0.4, 0.6],
                tau_r=[0.3, 0.2],
            ),
        ],
        ids=["repressilator", "mixed"],
    )
    def test_round_trip_simulation(self, net):
        # simulate the gene loop, read off a reduced-coordinate state, continue
        # in reduced coordinates, and compare against the reduced gene data
        tr = to_unidirectional(net)
        T = tr.total_delay
        t0 = 6.0 * T
        gt = integrate_gene(net, np.full(2 * net.n, 0.3), t0 + 6.0 * T, 256)
        m = 128
        kind, idx = tr.gene_vars[0]
        comp0 = idx if kind == "r" else net.n + idx
        theta = np.linspace(-1.0, 0.0, m + 1)
        hv = np.array(
            [tr.signs[0] * (gt.value(T * s + t0 + tr.time_shifts[0], comp0)
                            - tr.equilibrium_shift[0]) for s in theta]
        )
        hd = np.array(
            [tr.signs[0] * T * gt.derivative(T * s + t0 + tr.time_shifts[0], comp0)
             for s in theta]
        )
        tail = tr.reduced_from_gene(gt, t0)[1:]
        state = SystemState(1.0, hv, hd, tail)
        rtraj = integrate(tr.system, state, 4.0, m)
        worst = 0.0
        for t in np.linspace(0.25, 4.0, 16):
            z = np.array([rtraj.value(t, j) for j in range(2 * net.n)])
            z_ref = tr.reduced_from_gene(gt, t0 + T * t)
            worst = max(worst, float(np.max(np.abs(z - z_ref))))
        assert worst <= 1e-6

    def test_reduced_gene_values_round_trip(self):
        net = repressilator_preset(1.0, nu=2.0)
        tr = to_unidirectional(net)
        z = np.zeros(6)
        r, p = tr.to_gene_values(z)
        assert np.allclose(r, tr.r_star) and np.allclose(p, tr.p_star)
