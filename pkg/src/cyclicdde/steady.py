"""Equilibria and attractor-enclosing interval boxes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, UnsupportedSystemError, ValidationError
from .genenet import hill
from .systems import GeneNetwork, UnidirectionalSystem


@dataclass(frozen=True)
class IntervalBox:
    """Closed interval per component; encloses the attractor.

    For a zero-centered system each interval contains 0 in its interior.
    ``intervals[0]`` belongs to the delayed component.
    """

    intervals: tuple  # of (lo, hi)

    def __post_init__(self):
        object.__setattr__(
            self, "intervals", tuple((float(a), float(b)) for a, b in self.intervals)
        )
        if any(a > b for a, b in self.intervals):
            raise InputError("interval endpoints out of order")

    def contains(self, values, slack=0.0) -> bool:
        values = np.atleast_1d(np.asarray(values, dtype=float))
        return all(
            lo - slack <= v <= hi + slack for v, (lo, hi) in zip(values, self.intervals)
        )

    def radius(self) -> float:
        return max(max(abs(a), abs(b)) for a, b in self.intervals)

    def to_json(self):
        return {"intervals": [[a, b] for a, b in self.intervals]}


def equilibrium_unidirectional(system: UnidirectionalSystem):
    """The zero equilibrium with its right-hand-side residual certificate.

    Zero is the only equilibrium of a validated zero-centered loop; this
    checks the claim numerically rather than searching.
    """
    zero = np.zeros(system.N)
    residual = float(np.max(np.abs(system.loop().rhs(zero, 0.0))))
    if residual > 1e-14:
        raise ValidationError(
            f"system is not zero-centered (residual {residual:.3e}); "
            "shift the nonlinearities first"
        )
    return zero, residual


def _gene_f_chain(network: GeneNetwork):
    """F_i(x) = (beta_i / a_i) f_i((c_{i-1} / b_{i-1}) x), cyclic index."""
    n = network.n
    fns = []
    for i in range(n):
        ip = (i - 1) % n
        scale_in = network.c[ip] / network.b[ip]
        amp = network.beta[i] / network.a[i]
        nu_i = network.nu[i]
        kind = network.f_kind[i]
        fns.append(lambda x, s=scale_in, A=amp, nu=nu_i, k=kind: A * hill(s * x, nu, k))
    return fns


def equilibrium_gene(network: GeneNetwork):
    """Unique positive equilibrium (r*_1..r*_n, p*_1..p*_n).

    Solves the scalar fixed-point equation r = F_n(...F_1(r)...) by bisection:
    the composition is strictly decreasing with a positive value at 0, so the
    bracket [0, F(0)] is guaranteed.  Back-substitution then fills the
    remaining coordinates; the full steady-state residual is returned.
    """
    n = network.n
    fns = _gene_f_chain(network)

    def composite(x):
        for f in fns:
            x = f(x)
        return x

    lo, hi = 0.0, composite(0.0)
    if hi <= 0:
        raise ValidationError("composite regulation map must be positive at 0")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if composite(mid) - mid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16 * max(1.0, hi):
            break
    r_n = 0.5 * (lo + hi)

    r = np.empty(n)
    r[n - 1] = r_n
    for i in range(n):  # r_0 from r_{n-1}, then forward
        r[i] = fns[i](r[i - 1]) if i > 0 else fns[0](r[n - 1])
    p = network.c / network.b * r
    residual = _gene_residual(network, r, p)
    return r, p, residual


def _gene_residual(network, r, p):
    n = network.n
    res = 0.0
    for i in range(n):
        ip = (i - 1) % n
        fr = hill(p[ip], network.nu[i], network.f_kind[i])
        res = max(res, abs(-network.a[i] * r[i] + network.beta[i] * fr))
        res = max(res, abs(-network.b[i] * p[i] + network.c[i] * r[i]))
    return float(res)


def _interval_image(nl, interval):
    """Image of a closed interval under a monotone nonlinearity (exact endpoints)."""
    if interval is None:  # the whole real line: use the analytic limits
        lim = nl.limits()
        if lim is None:
            raise UnsupportedSystemError(
                "the feedback nonlinearity must be bounded for an attractor box"
            )
        a, b = lim
    else:
        a, b = (float(nl.value(interval[0])), float(nl.value(interval[1])))
    return (a, b) if a <= b else (b, a)


def attractor_box(system: UnidirectionalSystem) -> IntervalBox:
    """Attracting invariant interval box of a loop with bounded feedback.

    I_1 encloses the delayed component: the closed range of the full loop
    composition of the scaled maps g_j / mu_j; the remaining components are
    enclosed by pulling I_1 once around the loop.
    """
    if np.any(system.mu <= 0):
        raise UnsupportedSystemError("attractor box requires all decay rates positive")
    N = system.N
    scaled = [
        type(g)(g.kind, g.gain / m, g.slope, g.nu, g.shift)
        for g, m in zip(system.g, system.mu)
    ]
    # I_1 = closure of (G_1 o ... o G_N)(R)
    img = _interval_image(scaled[N - 1], None)
    for j in range(N - 2, -1, -1):
        img = _interval_image(scaled[j], img)
    intervals = [None] * N
    intervals[0] = img
    if N > 1:
        intervals[N - 1] = _interval_image(scaled[N - 1], img)
        for j in range(N - 2, 0, -1):
            intervals[j] = _interval_image(scaled[j], intervals[j + 1])
    return IntervalBox(tuple(intervals))
