"""Method-of-steps integration with dense cubic-Hermite output.

The step size is tied to the delay, h = tau / m, so delayed node arguments
are grid aligned and only the internal Runge-Kutta stages interpolate.  The
linear cosine benchmark system built by :func:`model_system` has an exact
closed-form solution and doubles as the accuracy oracle for the scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DivergenceError, DomainError, InputError
from .nonlinearity import Nonlinearity
from .systems import CyclicSystem, GeneNetwork, LoopSystem, SystemState, as_loop, hermite_deriv, hermite_eval


class Trajectory:
    """Dense solution record of a loop system on [-tau, t_end].

    Node k sits at t = (k - m) * h.  Rows k < m carry the initial history of
    the delayed component (other columns merely repeat the initial tail);
    rows k >= m carry the full solution, and their derivative columns equal
    the system right-hand side exactly (the record is self-consistent).
    """

    def __init__(self, loop: LoopSystem, m: int, vals, ders, n_nodes: int, initial: SystemState):
        self.loop = loop
        self.m = m
        self.h = loop.tau / m
        self._vals = vals
        self._ders = ders
        self._n_nodes = n_nodes  # filled rows
        self.initial = initial

    # -- window ------------------------------------------------------------

    @property
    def t_min(self) -> float:
        return -self.loop.tau

    @property
    def t_end(self) -> float:
        return (self._n_nodes - 1 - self.m) * self.h

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self._n_nodes) - self.m) * self.h

    @property
    def values(self) -> np.ndarray:
        """(nodes, n) value array; tail columns are meaningful for t >= 0."""
        return self._vals[: self._n_nodes]

    @property
    def derivatives(self) -> np.ndarray:
        return self._ders[: self._n_nodes]

    def node_index(self, t, *, nearest=False):
        pos = t / self.h + self.m
        k = int(round(pos))
        if not nearest and abs(pos - k) > 1e-9:
            raise DomainError(f"t = {t} is not a node time")
        return min(max(k, 0), self._n_nodes - 1)

    # -- dense evaluation ----------------------------------------------------

    def value(self, t, comp=0):
        """Dense value of one component (components >= 1 only for t >= 0)."""
        t = float(t)
        if t < self.t_min - 1e-12 or t > self.t_end + 1e-12:
            raise DomainError(f"t = {t} outside trajectory window")
        if comp > 0 and t < -1e-12:
            raise DomainError("tail components are defined for t >= 0 only")
        pos = t / self.h + self.m
        seg = min(max(int(math.floor(pos)), 0), self._n_nodes - 2)
        th = pos - seg
        v, d = self._vals, self._ders
        return float(
            hermite_eval(th, self.h, v[seg, comp], d[seg, comp], v[seg + 1, comp], d[seg + 1, comp])
        )

    def derivative(self, t, comp=0):
        pos = float(t) / self.h + self.m
        seg = min(max(int(math.floor(pos)), 0), self._n_nodes - 2)
        th = pos - seg
        v, d = self._vals, self._ders
        return float(
            hermite_deriv(th, self.h, v[seg, comp], d[seg, comp], v[seg + 1, comp], d[seg + 1, comp])
        )

    def state_at(self, t, m_out=None) -> SystemState:
        """State (history on [t - tau, t] plus tail) at time t >= 0."""
        tau = self.loop.tau
        if t < -1e-12 or t > self.t_end + 1e-12:
            raise DomainError(f"[t - tau, t] not inside the trajectory window for t = {t}")
        m_out = self.m if m_out is None else int(m_out)
        k = round(t / self.h)
        if m_out == self.m and abs(t / self.h - k) < 1e-9:
            # node-aligned fast path: exact copies of stored data
            k = int(k) + self.m
            sl = slice(k - self.m, k + 1)
            return SystemState(tau, self._vals[sl, 0].copy(), self._ders[sl, 0].copy(),
                               self._vals[k, 1:].copy())
        theta = np.linspace(t - tau, t, m_out + 1)
        hv = np.array([self.value(s, 0) for s in theta])
        hd = np.array([self.derivative(s, 0) for s in theta])
        tail = np.array([self.value(t, i) for i in range(1, self.loop.n)])
        return SystemState(tau, hv, hd, tail)

    def node_state(self, k) -> SystemState:
        """State at node index k (k >= m), without copying cost concerns."""
        sl = slice(k - self.m, k + 1)
        return SystemState(self.loop.tau, self._vals[sl, 0].copy(), self._ders[sl, 0].copy(),
                           self._vals[k, 1:].copy())

    # -- growth ---------------------------------------------------------------

    def extend(self, t_end):
        """Continue the integration in place up to (at least) t_end."""
        k_goal = self.m + int(math.ceil(t_end / self.h - 1e-9))
        if k_goal < self._n_nodes:
            return self
        need = k_goal + 1
        if need > self._vals.shape[0]:
            grow = max(need, 2 * self._vals.shape[0])
            vals = np.zeros((grow, self.loop.n))
            ders = np.zeros((grow, self.loop.n))
            vals[: self._n_nodes] = self._vals[: self._n_nodes]
            ders[: self._n_nodes] = self._ders[: self._n_nodes]
            self._vals, self._ders = vals, ders
        codes, pars = self.loop.kernel_arrays()
        bad = _kernels.run_loop_rk4(
            self._vals, self._ders, self.loop.mu, codes, pars,
            self.h, self.m, self._n_nodes - 1, k_goal,
        )
        if bad >= 0:
            self._n_nodes = bad + 1
            raise DivergenceError(
                f"trajectory blew up at t = {(bad - self.m) * self.h:.6g}",
                blowup_time=(bad - self.m) * self.h,
            )
        self._n_nodes = k_goal + 1
        return self

    # -- export -----------------------------------------------------------------

    def to_csv(self, path_or_file, labels=None):
        """Write the t >= 0 nodes as RFC-4180 CSV with 17 significant digits."""
        n = self.loop.n
        labels = labels or [f"x{i}" for i in range(n)]
        rows = ["t," + ",".join(labels)]
        for k in range(self.m, self._n_nodes):
            t = (k - self.m) * self.h
            rows.append(",".join(f"{v:.17g}" for v in [t, *self._vals[k]]))
        data = "\r\n".join(rows) + "\r\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(data)
        else:
            with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
                fh.write(data)


def integrate(system, initial: SystemState, t_end, steps_per_delay=128) -> Trajectory:
    """Integrate a loop system from an initial state.

    Classical RK4 with h = tau / m; delayed stage values come from cubic
    Hermite interpolation of already-computed history.  Pure in its inputs;
    concurrent calls are safe.
    """
    loop = as_loop(system)
    m = int(steps_per_delay)
    if m < 8:
        raise InputError("steps_per_delay must be >= 8")
    if t_end <= 0:
        raise InputError("t_end must be positive")
    if initial.n_components != loop.n:
        raise InputError(
            f"state has {initial.n_components} components, system has {loop.n}"
        )
    state = initial.resampled(m)
    n_total = m + int(math.ceil(t_end / (loop.tau / m) - 1e-9)) + 1
    vals = np.zeros((n_total, loop.n))
    ders = np.zeros((n_total, loop.n))
    vals[: m + 1, 0] = state.hist_vals
    ders[: m + 1, 0] = state.hist_ders
    vals[: m + 1, 1:] = state.tail  # placeholder before t = 0; real tail starts at node m
    traj = Trajectory(loop, m, vals, ders, m + 1, state)
    traj.extend(t_end)
    return traj


# ---------------------------------------------------------------------------
# exactly solvable benchmark system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSystem:
    """Linear loop with pure-cosine solutions x_j(t) = cos(omega t + j phi).

    For a loop of N+1 components, phi = pi / (2 (N + 1)) and
    omega = pi (J - 1/2) with J odd; the solution's sign-change count over one
    delay interval is J - 1.
    """

    system: CyclicSystem
    N: int
    J: int
    omega: float
    phi: float

    def exact(self, t):
        """Exact solution vector at time t."""
        j = np.arange(self.N + 1)
        return np.cos(self.omega * np.asarray(t, dtype=float)[..., None] + j * self.phi)

    def exact_component(self, t, j):
        return np.cos(self.omega * np.asarray(t, dtype=float) + j * self.phi)

    def exact_state(self, t=0.0, m=512) -> SystemState:
        theta = np.linspace(t - 1.0, t, m + 1)
        return SystemState(
            1.0,
            np.cos(self.omega * theta),
            -self.omega * np.sin(self.omega * theta),
            np.cos(self.omega * t + np.arange(1, self.N + 1) * self.phi),
        )


def model_system(N: int, J: int) -> ModelSystem:
    """Cosine benchmark loop with unit delay.

    dx_j = omega [-(c/s) x_j + (1/s) x_{j+1}],  dx_N = omega [-(c/s) x_N - (1/s) x_0(t-1)]
    with c = cos(phi), s = sin(phi).
    """
    if N < 0:
        raise InputError("N must be >= 0")
    if J < 1 or J % 2 == 0:
        raise InputError("J must be odd and positive")
    phi = math.pi / (2.0 * (N + 1))
    omega = math.pi * (J - 0.5)
    c, s = math.cos(phi), math.sin(phi)
    if abs(c) < 1e-15:  # N = 0: phi = pi/2, the decay term vanishes exactly
        c = 0.0
    mu = np.full(N + 1, omega * c / s)
    nls = [Nonlinearity("linear_gain", gain=omega / s) for _ in range(N)]
    nls.append(Nonlinearity("linear_gain", gain=-omega / s))
    return ModelSystem(CyclicSystem(mu, tuple(nls), 1.0), N, J, omega, phi)


# ---------------------------------------------------------------------------
# gene-network integration
# ---------------------------------------------------------------------------


class GeneTrajectory:
    """Dense solution record of a gene loop; components r_1..r_n, p_1..p_n."""

    def __init__(self, network: GeneNetwork, h, vals, ders, n_nodes, m_hist):
        self.network = network
        self.h = h
        self._vals = vals
        self._ders = ders
        self._n_nodes = n_nodes
        self.m_hist = m_hist  # node index of t = 0

    @property
    def t_end(self):
        return (self._n_nodes - 1 - self.m_hist) * self.h

    @property
    def times(self):
        return (np.arange(self._n_nodes) - self.m_hist) * self.h

    @property
    def values(self):
        return self._vals[: self._n_nodes]

    def value(self, t, comp):
        pos = float(t) / self.h + self.m_hist
        seg = min(max(int(math.floor(pos)), 0), self._n_nodes - 2)
        th = pos - seg
        v, d = self._vals, self._ders
        return float(
            hermite_eval(th, self.h, v[seg, comp], d[seg, comp], v[seg + 1, comp], d[seg + 1, comp])
        )

    def derivative(self, t, comp):
        pos = float(t) / self.h + self.m_hist
        seg = min(max(int(math.floor(pos)), 0), self._n_nodes - 2)
        th = pos - seg
        v, d = self._vals, self._ders
        return float(
            hermite_deriv(th, self.h, v[seg, comp], d[seg, comp], v[seg + 1, comp], d[seg + 1, comp])
        )

    def to_csv(self, path_or_file):
        n = self.network.n
        labels = [f"{kind}{i+1}" for i in range(n) for kind in ("r", "p")]
        order = [c + n * k for c in range(n) for k in (0, 1)]
        rows = ["t," + ",".join(labels)]
        for k in range(self.m_hist, self._n_nodes):
            t = (k - self.m_hist) * self.h
            rows.append(",".join(f"{v:.17g}" for v in [t, *self._vals[k, order]]))
        data = "\r\n".join(rows) + "\r\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(data)
        else:
            with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
                fh.write(data)


def integrate_gene(network: GeneNetwork, initial, t_end, steps_per_delay=128) -> GeneTrajectory:
    """Integrate a gene loop from nonnegative initial histories.

    ``initial`` is either a length-2n vector of constants (r then p) or a
    length-2n sequence of callables on [-T_max, 0].  The step honours every
    individual delay: h never exceeds the smallest positive one, so all
    delayed stage lookups stay inside computed history.
    """
    n = network.n
    if t_end <= 0:
        raise InputError("t_end must be positive")
    delays = np.concatenate((network.tau_p, network.tau_r))
    pos_delays = delays[delays > 0]
    t_hist = float(np.max(delays)) if pos_delays.size else 0.0
    h_target = min(network.total_delay / steps_per_delay, float(np.min(pos_delays)))
    m_hist = max(1, int(math.ceil(t_hist / h_target - 1e-9))) if t_hist > 0 else 1
    h = t_hist / m_hist if t_hist > 0 else h_target

    callables = not np.isscalar(initial[0]) and callable(initial[0])
    vals_hist = np.zeros((m_hist + 1, 2 * n))
    ders_hist = np.zeros((m_hist + 1, 2 * n))
    theta = np.linspace(-t_hist, 0.0, m_hist + 1)
    if callables:
        for c_idx, fn in enumerate(initial):
            vals_hist[:, c_idx] = [float(fn(t)) for t in theta]
            eps = 1e-6 * max(t_hist, 1.0)
            ders_hist[:, c_idx] = [
                (float(fn(min(t + eps, 0.0))) - float(fn(max(t - eps, -t_hist)))) /
                ((min(t + eps, 0.0)) - (max(t - eps, -t_hist)))
                for t in theta
            ]
    else:
        init = np.asarray(initial, dtype=float)
        if init.size != 2 * n:
            raise InputError(f"need {2 * n} initial values")
        vals_hist[:] = init
    if np.any(vals_hist < 0):
        raise InputError("gene initial data must be nonnegative")

    n_total = m_hist + int(math.ceil(t_end / h - 1e-9)) + 1
    vals = np.zeros((n_total, 2 * n))
    ders = np.zeros((n_total, 2 * n))
    vals[: m_hist + 1] = vals_hist
    ders[: m_hist + 1] = ders_hist

    fdec = np.array([1 if k == "decreasing" else 0 for k in network.f_kind], dtype=np.int32)
    bad = _kernels.run_gene_rk4(
        vals, ders, network.a, network.b, network.beta, network.c, network.nu,
        fdec, network.tau_p / h, network.tau_r / h, h, m_hist, n_total - 1,
    )
    if bad >= 0:
        raise DivergenceError(
            f"gene trajectory blew up at t = {(bad - m_hist) * h:.6g}",
            blowup_time=(bad - m_hist) * h,
        )
    return GeneTrajectory(network, h, vals, ders, n_total, m_hist)
