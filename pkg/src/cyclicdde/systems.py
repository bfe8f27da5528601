"""System definitions, the state space, and feedback-sign machinery.

Three user-facing system families:

* :class:`UnidirectionalSystem` -- x_j' = -mu_j x_j + g_j(x_{j+1}), the last
  component driven by the delayed first one, overall negative feedback.
* :class:`CyclicSystem` -- the wider loop family with an optional monotone
  coupling to the previous neighbour in every component and the delay placed
  on the wrap-around edge.
* :class:`GeneNetwork` -- mRNA/protein loops with Hill regulation
  (see :mod:`cyclicdde.genenet` for the transformation to standard form).

States pair a dense history segment for the delayed component with point
values of the remaining components.  All types are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError, ValidationError
from .nonlinearity import CODE_NONE, Nonlinearity

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(16)
# map from [-1, 1] to [0, 1]
_GAUSS_S = 0.5 * (_GAUSS_NODES + 1.0)
_GAUSS_W = 0.5 * _GAUSS_WEIGHTS


# ---------------------------------------------------------------------------
# state space
# ---------------------------------------------------------------------------


def hermite_eval(theta, h, v0, d0, v1, d1):
    """Cubic Hermite value at relative position theta in [0, 1] of one segment."""
    t2 = theta * theta
    t3 = t2 * theta
    return (
        (2.0 * t3 - 3.0 * t2 + 1.0) * v0
        + (t3 - 2.0 * t2 + theta) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * v1
        + (t3 - t2) * h * d1
    )


def hermite_deriv(theta, h, v0, d0, v1, d1):
    """Derivative of the cubic Hermite segment at relative position theta."""
    t2 = theta * theta
    return (
        (6.0 * t2 - 6.0 * theta) * v0 / h
        + (3.0 * t2 - 4.0 * theta + 1.0) * d0
        + (-6.0 * t2 + 6.0 * theta) * v1 / h
        + (3.0 * t2 - 2.0 * theta) * d1
    )


@dataclass(frozen=True)
class SystemState:
    """Element of the state space: history of the delayed component + tail.

    The history lives on a uniform grid of ``m + 1`` nodes spanning exactly
    ``[-tau, 0]`` and stores (value, derivative) pairs so that off-node values
    interpolate with cubic Hermite accuracy.
    """

    tau: float
    hist_vals: np.ndarray  # (m+1,)
    hist_ders: np.ndarray  # (m+1,)
    tail: np.ndarray  # (n-1,)

    def __post_init__(self):
        hv = np.ascontiguousarray(np.asarray(self.hist_vals, dtype=float))
        hd = np.ascontiguousarray(np.asarray(self.hist_ders, dtype=float))
        tl = np.ascontiguousarray(np.atleast_1d(np.asarray(self.tail, dtype=float)))
        object.__setattr__(self, "hist_vals", hv)
        object.__setattr__(self, "hist_ders", hd)
        object.__setattr__(self, "tail", tl)
        if self.tau <= 0:
            raise InputError("state requires tau > 0")
        if hv.ndim != 1 or hv.shape != hd.shape or hv.size < 2:
            raise InputError("history needs matching value/derivative grids with >= 2 nodes")

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_function(cls, tau, m, fn, dfn=None, tail=()):
        """Sample a callable history fn(theta) on [-tau, 0] at m+1 nodes.

        The derivative is taken from ``dfn`` when given, otherwise by a
        central difference of ``fn``.
        """
        theta = np.linspace(-tau, 0.0, m + 1)
        vals = np.array([float(fn(t)) for t in theta])
        if dfn is not None:
            ders = np.array([float(dfn(t)) for t in theta])
        else:
            eps = 1e-6 * tau
            ders = np.array([(float(fn(t + eps)) - float(fn(t - eps))) / (2 * eps) for t in theta])
        return cls(tau, vals, ders, np.asarray(tail, dtype=float))

    @classmethod
    def constant(cls, tau, m, values):
        """Constant state: values[0] fills the history, the rest is the tail."""
        values = np.atleast_1d(np.asarray(values, dtype=float))
        return cls(
            tau,
            np.full(m + 1, values[0]),
            np.zeros(m + 1),
            values[1:].copy() if values.size > 1 else np.zeros(0),
        )

    # -- geometry ---------------------------------------------------------

    @property
    def m(self) -> int:
        return self.hist_vals.size - 1

    @property
    def n_components(self) -> int:
        return 1 + self.tail.size

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(-self.tau, 0.0, self.m + 1)

    def max_norm(self) -> float:
        t = float(np.max(np.abs(self.tail))) if self.tail.size else 0.0
        return max(float(np.max(np.abs(self.hist_vals))), t)

    def head(self) -> np.ndarray:
        """Value vector at theta = 0: (x_0(0), tail...)."""
        return np.concatenate(([self.hist_vals[-1]], self.tail))

    # -- dense evaluation --------------------------------------------------

    def _locate(self, theta):
        h = self.tau / self.m
        pos = (np.asarray(theta, dtype=float) + self.tau) / h
        seg = np.clip(np.floor(pos).astype(int), 0, self.m - 1)
        return seg, pos - seg, h

    def value_at(self, theta):
        """History value at theta in [-tau, 0] (cubic Hermite)."""
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < -self.tau - 1e-12) or np.any(theta > 1e-12):
            raise DomainError("theta outside [-tau, 0]")
        seg, t, h = self._locate(theta)
        v, d = self.hist_vals, self.hist_ders
        return hermite_eval(t, h, v[seg], d[seg], v[seg + 1], d[seg + 1])

    def derivative_at(self, theta):
        theta = np.asarray(theta, dtype=float)
        seg, t, h = self._locate(theta)
        v, d = self.hist_vals, self.hist_ders
        return hermite_deriv(t, h, v[seg], d[seg], v[seg + 1], d[seg + 1])

    def resampled(self, m_out):
        """Same state on an m_out-node grid (exact at shared nodes)."""
        if m_out == self.m:
            return self
        theta = np.linspace(-self.tau, 0.0, m_out + 1)
        return SystemState(self.tau, self.value_at(theta), self.derivative_at(theta), self.tail)

    # -- linear structure ---------------------------------------------------

    def _compatible(self, other):
        if self.m != other.m or self.tail.size != other.tail.size or self.tau != other.tau:
            raise InputError("states live on different grids")

    def __sub__(self, other):
        self._compatible(other)
        return SystemState(
            self.tau,
            self.hist_vals - other.hist_vals,
            self.hist_ders - other.hist_ders,
            self.tail - other.tail,
        )

    def __add__(self, other):
        self._compatible(other)
        return SystemState(
            self.tau,
            self.hist_vals + other.hist_vals,
            self.hist_ders + other.hist_ders,
            self.tail + other.tail,
        )

    def __mul__(self, alpha):
        alpha = float(alpha)
        return SystemState(
            self.tau, alpha * self.hist_vals, alpha * self.hist_ders, alpha * self.tail
        )

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# internal loop view shared by the integrator and spectral code
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopSystem:
    """Normalized loop layout: component 0 is the delayed one.

    dx_i = -mu_i x_i + next_i(x_{i+1})            (i < n-1)
    dx_{n-1} = -mu_{n-1} x_{n-1} + next_{n-1}(x_0(t - tau))
    plus an optional increasing coupling prev_i(x_{i-1}) for i >= 1.
    """

    tau: float
    mu: np.ndarray
    next_nl: tuple
    prev_nl: tuple  # entries are Nonlinearity or None; alpha folded into the gain

    @property
    def n(self) -> int:
        return self.mu.size

    def rhs(self, x, x0_delayed):
        """Right-hand side at a full component vector (reference path)."""
        x = np.asarray(x, dtype=float)
        out = -self.mu * x
        n = self.n
        for i in range(n):
            arg = x[i + 1] if i < n - 1 else x0_delayed
            out[i] += float(self.next_nl[i].value(arg))
            if self.prev_nl[i] is not None:
                out[i] += float(self.prev_nl[i].value(x[i - 1]))
        return out

    def kernel_arrays(self):
        """Pack nonlinearity parameters into flat arrays for the kernels."""
        n = self.n
        codes = np.full((2, n), CODE_NONE, dtype=np.int32)
        pars = np.zeros((2, n, 5), dtype=float)
        for row, nls in enumerate((self.next_nl, self.prev_nl)):
            for i, nl in enumerate(nls):
                if nl is None:
                    continue
                code, g, k, nu, s, base = nl.kernel_params()
                codes[row, i] = code
                pars[row, i] = (g, k, nu, s, base)
        return codes, pars

    def linearization(self):
        """(A, B) of dx = A x + B x(t - tau) at the zero equilibrium."""
        n = self.n
        A = np.zeros((n, n))
        B = np.zeros((n, n))
        A[np.diag_indices(n)] = -self.mu
        for i in range(n):
            d = float(self.next_nl[i].derivative(0.0))
            if i < n - 1:
                A[i, i + 1] = d
            else:
                B[n - 1, 0] = d
            if self.prev_nl[i] is not None:
                A[i, i - 1] = float(self.prev_nl[i].derivative(0.0))
        return A, B

    def loop_gain(self) -> float:
        """|product of next-coupling slopes at 0| around the loop."""
        return float(abs(np.prod([nl.derivative(0.0) for nl in self.next_nl])))


# ---------------------------------------------------------------------------
# user-facing systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnidirectionalSystem:
    """x_j' = -mu_j x_j + g_j(x_{j+1}), j = 1..N, index mod N, x_1 delayed.

    Exactly the last nonlinearity must be decreasing (negative loop feedback).
    """

    mu: np.ndarray
    g: tuple
    tau: float

    def __post_init__(self):
        mu = np.ascontiguousarray(np.atleast_1d(np.asarray(self.mu, dtype=float)))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "g", tuple(self.g))
        if self.tau <= 0:
            raise ValidationError("delay must be positive")
        if mu.size != len(self.g) or mu.size < 1:
            raise ValidationError("need one nonlinearity per component")
        if np.any(mu < 0) or not np.all(np.isfinite(mu)):
            raise ValidationError("decay rates must be finite and >= 0")
        signs = [nl.derivative_sign for nl in self.g]
        if any(s <= 0 for s in signs[:-1]) or signs[-1] >= 0:
            raise ValidationError(
                "exactly the last nonlinearity must be decreasing "
                f"(got derivative signs {signs})"
            )

    @property
    def N(self) -> int:
        return self.mu.size

    @property
    def zero_centered(self) -> bool:
        return all(float(nl.value(0.0)) == 0.0 for nl in self.g)

    def loop(self) -> LoopSystem:
        return LoopSystem(self.tau, self.mu, tuple(self.g), (None,) * self.N)

    def loop_gain(self) -> float:
        return self.loop().loop_gain()

    def with_loop_gain(self, K):
        """Same system with the last gain rescaled so the loop gain equals K."""
        if K <= 0:
            raise InputError("loop gain must be positive")
        cur = self.loop_gain()
        gN = self.g[-1]
        scale = K / cur
        new_last = Nonlinearity(gN.kind, gN.gain * scale, gN.slope, gN.nu, gN.shift)
        return UnidirectionalSystem(self.mu, self.g[:-1] + (new_last,), self.tau)

    def to_json(self):
        return {
            "type": "unidirectional",
            "tau": self.tau,
            "mu": [float(v) for v in self.mu],
            "g": [nl.to_json() for nl in self.g],
        }


@dataclass(frozen=True)
class CyclicSystem:
    """Loop of N+1 components in additive form.

    f^i(u, x, v) = prev_i(u) - mu_i x + next_i(v), the previous-neighbour
    term absent for component 0, the delayed argument only in component N.
    """

    mu: np.ndarray
    next_nl: tuple
    tau: float
    prev_nl: tuple = None

    def __post_init__(self):
        mu = np.ascontiguousarray(np.atleast_1d(np.asarray(self.mu, dtype=float)))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "next_nl", tuple(self.next_nl))
        prev = self.prev_nl if self.prev_nl is not None else (None,) * mu.size
        object.__setattr__(self, "prev_nl", tuple(prev))
        n = mu.size
        if self.tau <= 0:
            raise ValidationError("delay must be positive")
        if len(self.next_nl) != n or len(self.prev_nl) != n or n < 1:
            raise ValidationError("coupling lists must match the component count")
        if self.prev_nl[0] is not None:
            raise ValidationError("component 0 has no previous-neighbour coupling")
        if np.any(mu < 0) or not np.all(np.isfinite(mu)):
            raise ValidationError("decay rates must be finite and >= 0")
        signs = [nl.derivative_sign for nl in self.next_nl]
        if any(s <= 0 for s in signs[:-1]) or signs[-1] >= 0:
            raise ValidationError("loop feedback must be negative exactly at the wrap edge")
        for p in self.prev_nl[1:]:
            if p is not None and p.derivative_sign < 0:
                raise ValidationError("previous-neighbour couplings must be nondecreasing")

    @property
    def N(self) -> int:
        """Largest component index (components run 0..N)."""
        return self.mu.size - 1

    def loop(self) -> LoopSystem:
        return LoopSystem(self.tau, self.mu, self.next_nl, self.prev_nl)

    def loop_gain(self) -> float:
        return self.loop().loop_gain()

    def to_json(self):
        return {
            "type": "cyclic",
            "tau": self.tau,
            "mu": [float(v) for v in self.mu],
            "g": [nl.to_json() for nl in self.next_nl],
        }


@dataclass(frozen=True)
class GeneNetwork:
    """Cyclic mRNA/protein loop with Hill regulation.

    For gene index i (0-based here):
      r_i' = -a_i r_i + beta_i f_i(p_{i-1}(t - tau_p[i-1]))
      p_i' = -b_i p_i + c_i r_i(t - tau_r[i])
    with f_i an increasing or decreasing Hill function; the number of
    decreasing f_i must be odd (negative loop feedback).
    ``tau_p[k]`` is the delay with which protein k enters the next gene.
    """

    a: np.ndarray
    b: np.ndarray
    beta: np.ndarray
    c: np.ndarray
    nu: np.ndarray
    f_kind: tuple  # 'increasing' | 'decreasing' per gene
    tau_p: np.ndarray
    tau_r: np.ndarray

    def __post_init__(self):
        for name in ("a", "b", "beta", "c", "nu", "tau_p", "tau_r"):
            arr = np.ascontiguousarray(np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "f_kind", tuple(self.f_kind))
        n = self.a.size
        if any(getattr(self, name).size != n for name in ("b", "beta", "c", "nu", "tau_p", "tau_r")):
            raise ValidationError("all per-gene parameter arrays must share one length")
        if len(self.f_kind) != n:
            raise ValidationError("need one regulation kind per gene")
        if any(k not in ("increasing", "decreasing") for k in self.f_kind):
            raise ValidationError("regulation kinds are 'increasing' or 'decreasing'")
        for name in ("a", "b", "beta", "c"):
            if np.any(getattr(self, name) <= 0):
                raise ValidationError(f"rates '{name}' must be strictly positive")
        if np.any(self.nu < 1):
            raise ValidationError("Hill exponents must be >= 1")
        if np.any(self.tau_p < 0) or np.any(self.tau_r < 0):
            raise ValidationError("delays must be >= 0")
        if sum(k == "decreasing" for k in self.f_kind) % 2 == 0:
            raise ValidationError("the number of decreasing regulations must be odd")
        if self.total_delay <= 0:
            raise ValidationError("total loop delay must be positive")

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def total_delay(self) -> float:
        return float(np.sum(self.tau_p) + np.sum(self.tau_r))

    def to_json(self):
        return {
            "type": "gene",
            "a": [float(v) for v in self.a],
            "b": [float(v) for v in self.b],
            "beta": [float(v) for v in self.beta],
            "c": [float(v) for v in self.c],
            "nu": [float(v) for v in self.nu],
            "f_kind": list(self.f_kind),
            "tau_p": [float(v) for v in self.tau_p],
            "tau_r": [float(v) for v in self.tau_r],
        }


def as_loop(system) -> LoopSystem:
    if isinstance(system, LoopSystem):
        return system
    if isinstance(system, (UnidirectionalSystem, CyclicSystem)):
        return system.loop()
    raise InputError(f"not a loop system: {type(system).__name__}")


# ---------------------------------------------------------------------------
# feedback validation
# ---------------------------------------------------------------------------

DEFAULT_SIGN_GRID = np.concatenate(
    (-np.geomspace(1e6, 1e-6, 121), np.geomspace(1e-6, 1e6, 121))
)


@dataclass(frozen=True)
class SignEntry:
    name: str
    required: str  # '>0' | '>=0' | '<0'
    min: float
    max: float
    passed: bool


@dataclass(frozen=True)
class SignReport:
    entries: tuple
    passed: bool

    def to_json(self):
        return {
            "passed": self.passed,
            "entries": [
                {
                    "name": e.name,
                    "required": e.required,
                    "min": e.min,
                    "max": e.max,
                    "passed": e.passed,
                }
                for e in self.entries
            ],
        }


def _sign_entry(name, required, values, where):
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DomainError(f"{name}: non-finite derivative at x = {where[i]!r}")
    lo, hi = float(np.min(values)), float(np.max(values))
    ok = {">0": lo > 0, ">=0": lo >= 0, "<0": hi < 0}
    return SignEntry(name, required, lo, hi, ok[required])


def validate_feedback(system, grid=None) -> SignReport:
    """Numeric check of the monotone-feedback sign pattern on a sample grid.

    Reports min/max of every coupling derivative over the grid and whether the
    required sign holds (strictly where strictness is required).
    """
    grid = DEFAULT_SIGN_GRID if grid is None else np.asarray(grid, dtype=float)
    loop = as_loop(system)
    n = loop.n
    entries = []
    for i, nl in enumerate(loop.next_nl):
        required = "<0" if i == n - 1 else ">0"
        entries.append(_sign_entry(f"next[{i}]'", required, nl.derivative(grid), grid))
    for i, nl in enumerate(loop.prev_nl):
        if nl is None:
            continue
        entries.append(_sign_entry(f"prev[{i}]'", ">=0", nl.derivative(grid), grid))
    if not np.all(np.isfinite(loop.mu)):
        raise DomainError("non-finite decay rate")
    return SignReport(tuple(entries), all(e.passed for e in entries))


# ---------------------------------------------------------------------------
# difference / variational coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DifferenceCoefficients:
    """Integral-averaged coefficients of the linear system for a trajectory pair.

    ``a[i]`` multiplies the previous neighbour (0 when that coupling is
    absent), ``c[i]`` the component itself, ``b[i]`` the next neighbour (the
    delayed component for i = n-1).
    """

    t: float
    a: np.ndarray
    c: np.ndarray
    b: np.ndarray

    def sign_pattern_holds(self) -> bool:
        n = self.b.size
        return bool(
            np.all(self.b[: n - 1] > 0) and self.b[n - 1] < 0 and np.all(self.a >= 0)
        )


def _avg_derivative(nl, x, y, nodes=_GAUSS_S, weights=_GAUSS_W):
    """integral_0^1 nl'(x + s (y - x)) ds by fixed-order Gauss quadrature."""
    pts = x + nodes * (y - x)
    return float(np.dot(weights, nl.derivative(pts)))


def difference_coefficients(traj_x, traj_y, system, t, nodes=_GAUSS_S, weights=_GAUSS_W):
    """Coefficients of the difference system of two trajectories at time t.

    For identical trajectories this reduces to the variational coefficients
    along the single trajectory.  The sign pattern of a validated
    negative-feedback loop is inherited: b_i > 0 off the wrap edge, b_{n-1} < 0,
    a_i >= 0.
    """
    loop = as_loop(system)
    n = loop.n
    for traj in (traj_x, traj_y):
        if t - loop.tau < traj.t_min - 1e-12 or t > traj.t_end + 1e-12:
            raise DomainError(f"trajectory does not cover [t - tau, t] for t = {t}")
    X = np.array([traj_x.value(t, i) for i in range(n)])
    Y = np.array([traj_y.value(t, i) for i in range(n)])
    Xd = traj_x.value(t - loop.tau, 0)
    Yd = traj_y.value(t - loop.tau, 0)
    a = np.zeros(n)
    b = np.zeros(n)
    c = -loop.mu.copy()  # additive decay: the own-component slope is exactly -mu
    for i in range(n):
        if i < n - 1:
            b[i] = _avg_derivative(loop.next_nl[i], X[i + 1], Y[i + 1], nodes, weights)
        else:
            b[i] = _avg_derivative(loop.next_nl[i], Xd, Yd, nodes, weights)
        if loop.prev_nl[i] is not None:
            a[i] = _avg_derivative(loop.prev_nl[i], X[i - 1], Y[i - 1], nodes, weights)
    return DifferenceCoefficients(t, a, c, b)
