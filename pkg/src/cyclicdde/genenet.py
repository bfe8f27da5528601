"""Gene-regulatory loop models and their reduction to the standard loop form.

The reduction removes the internal delays by time-shifting each variable
along the loop, reverses the indexing so every component is driven by its
successor, rescales time by the total loop delay T (making the delay 1), and
finally translates the unique positive equilibrium to the origin.  Only T
(not the placement of the individual delays) survives into the reduced
system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .nonlinearity import Nonlinearity
from .systems import GeneNetwork, UnidirectionalSystem


def hill(x, nu, kind):
    """Classical Hill function on x >= 0: increasing x^nu/(1+x^nu) or decreasing 1/(1+x^nu)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("Hill functions take nonnegative arguments")
    if kind not in ("increasing", "decreasing"):
        raise InputError("kind must be 'increasing' or 'decreasing'")
    a = x**nu
    return a / (1.0 + a) if kind == "increasing" else 1.0 / (1.0 + a)


def hill_derivative(x, nu, kind):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("Hill functions take nonnegative arguments")
    d = nu * x ** (nu - 1.0) / (1.0 + x**nu) ** 2
    return d if kind == "increasing" else -d


@dataclass(frozen=True)
class GeneTransform:
    """Reduced standard-form system plus the data to map solutions back.

    system
        zero-centered loop with delay 1, N = 2n components.
    equilibrium_shift
        x* of the reduced (pre-centering) coordinates; the reduced variables
        are z_j = eps_j * u_(map) - x*_j.
    loop_gain
        |product of coupling slopes at the equilibrium| around the loop.
    signs
        eps_j in {-1, +1} applied to each reduced component.
    gene_vars
        per reduced component j: ('r'|'p', gene index 0-based).
    time_shifts
        per reduced component j: the forward time shift S (gene time units)
        applied before reversal, i.e. x_j(t) = eps_j * u(T t + S_j).
    r_star, p_star
        the gene equilibrium.
    """

    system: UnidirectionalSystem
    total_delay: float
    equilibrium_shift: np.ndarray
    loop_gain: float
    signs: np.ndarray
    gene_vars: tuple
    time_shifts: np.ndarray
    r_star: np.ndarray
    p_star: np.ndarray

    def to_gene_values(self, z):
        """Map a reduced component vector back to gene (r, p) values.

        Returns (r_vals, p_vals) from z via x_j = eps_j z_j + x*_j.  Each
        component carries its own time shift, so for a single reduced time
        the values belong to shifted gene times; per-coordinate range checks
        along a periodic orbit or at an equilibrium are unaffected.
        """
        z = np.asarray(z, dtype=float)
        n = self.r_star.size
        r = np.empty(n)
        p = np.empty(n)
        for j, (kind, idx) in enumerate(self.gene_vars):
            val = self.signs[j] * z[j] + self.equilibrium_shift[j]
            if kind == "r":
                r[idx] = val
            else:
                p[idx] = val
        return r, p

    def reduced_from_gene(self, gene_traj, t_gene):
        """Reduced component vector at reduced time (t_gene - S_j)/T per component.

        Samples the gene trajectory so that reduced component j is read at
        gene time t_gene + S_j - S_max; requires the trajectory to cover it.
        """
        n = self.r_star.size
        z = np.empty(2 * n)
        for j, (kind, idx) in enumerate(self.gene_vars):
            comp = idx if kind == "r" else n + idx
            u = gene_traj.value(t_gene + self.time_shifts[j], comp)
            z[j] = self.signs[j] * (u - self.equilibrium_shift[j])
        return z


def to_unidirectional(network: GeneNetwork) -> GeneTransform:
    """Reduce a gene loop to the zero-centered standard form with delay 1."""
    from .steady import equilibrium_gene  # local import; steady uses hill()

    n = network.n
    N = 2 * n
    T = network.total_delay
    r_star, p_star, _ = equilibrium_gene(network)

    # driving order around the loop: u_{2i} = r_i, u_{2i+1} = p_i (0-based),
    # u_k drives u_{k+1}; reversal y_j = u_{(2n - 1) - (j - 1)} for j = 1..2n
    # puts the loop into next-neighbour form.  Using 0-based j below.
    gene_vars = []
    mu = np.empty(N)
    base_nl = []
    equil = np.empty(N)
    shifts = np.empty(N)
    # cumulative forward shifts along the driving order
    S = np.zeros(2 * n)
    for k in range(1, 2 * n):
        if (k - 1) % 2 == 0:  # edge r_i -> p_i
            S[k] = S[k - 1] + network.tau_r[(k - 1) // 2]
        else:  # edge p_i -> r_{i+1}
            S[k] = S[k - 1] + network.tau_p[(k - 1) // 2]
    for j in range(N):
        k = (2 * n - 1) - j  # driving-order index of reduced component j
        i = k // 2  # gene index
        if k % 2 == 0:  # u_k = r_i
            gene_vars.append(("r", i))
            mu[j] = T * network.a[i]
            # r_i is driven by p_{i-1} through beta_i f_i
            ip = (i - 1) % n
            base_nl.append(("hill", i, ip))
            equil[j] = r_star[i]
        else:  # u_k = p_i
            gene_vars.append(("p", i))
            mu[j] = T * network.b[i]
            base_nl.append(("linear", i, None))
            equil[j] = p_star[i]
        shifts[j] = S[k]

    # sign assignment: eps_0 = +1, eps_{j+1} = eps_j * sign(g_j'), which makes
    # every coupling increasing except the wrap edge (odd decreasing count)
    eps = np.ones(N)
    raw_sign = np.empty(N)
    for j in range(N):
        kind, i, ip = base_nl[j]
        if kind == "linear":
            raw_sign[j] = 1.0
        else:
            raw_sign[j] = -1.0 if network.f_kind[i] == "decreasing" else 1.0
    for j in range(N - 1):
        eps[j + 1] = eps[j] * raw_sign[j]
    if eps[N - 1] * raw_sign[N - 1] * eps[0] >= 0:
        raise InputError("sign assignment failed: loop feedback is not negative")

    nls = []
    for j in range(N):
        kind, i, ip = base_nl[j]
        eps_out, eps_in = eps[j], eps[(j + 1) % N]
        if kind == "linear":
            nls.append(Nonlinearity("linear_gain", gain=eps_out * eps_in * T * network.c[i]))
        else:
            # g_j(z) = eps_out T beta_i [f_i(eps_in z + p*_{ip}) - f_i(p*_{ip})],
            # expressed on the increasing Hill profile (decreasing = 1 - increasing)
            flip = -1.0 if network.f_kind[i] == "decreasing" else 1.0
            nls.append(
                Nonlinearity(
                    "shifted_hill",
                    gain=eps_out * flip * T * network.beta[i],
                    slope=eps_in,
                    nu=float(network.nu[i]),
                    shift=float(p_star[ip]),
                )
            )

    system = UnidirectionalSystem(mu, tuple(nls), 1.0)
    K = system.loop_gain()
    return GeneTransform(
        system, T, equil, K, eps, tuple(gene_vars), shifts, r_star, p_star
    )


def repressilator_preset(T, nu=2.0, beta=1.0) -> GeneNetwork:
    """Symmetric three-gene repression loop with the total delay split evenly."""
    if T <= 0:
        raise InputError("total delay must be positive")
    d = np.full(3, T / 6.0)
    return GeneNetwork(
        a=np.ones(3),
        b=np.ones(3),
        beta=np.full(3, float(beta)),
        c=np.ones(3),
        nu=np.full(3, float(nu)),
        f_kind=("decreasing",) * 3,
        tau_p=d,
        tau_r=d,
    )
