"""Characteristic-equation analysis for the linearized loops.

Covers evaluation of the characteristic function, certified root finding by
argument-principle rectangle subdivision with Newton refinement, the two
parameter borders of the loop gain (onset of instability, disappearance of
real eigenvalues), verification that the leading spectrum is a single
unstable conjugate pair, and the planar spectral projection built from the
left/right null vectors of the characteristic matrix.

Everything here is pure; rectangle subdivision visits cells in a fixed order
so results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, MultipleEigenvalueError
from .systems import SystemState, as_loop

# ---------------------------------------------------------------------------
# characteristic functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UniCharFunction:
    """chi(lam) = prod_j (lam + mu_j) + K exp(-lam tau)."""

    mu: tuple
    K: float
    tau: float
    _pc: np.ndarray = field(init=False, repr=False, compare=False)
    _dpc: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.K < 0:
            raise InputError("loop gain K must be nonnegative")
        pc = np.poly(np.asarray([-m for m in self.mu], dtype=float))
        object.__setattr__(self, "_pc", pc)
        object.__setattr__(self, "_dpc", np.polyder(pc))

    @property
    def n(self):
        return len(self.mu)

    def eval(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return np.polyval(self._pc, lam) + self.K * np.exp(-lam * self.tau)

    def eval_with_deriv(self, lam):
        lam = np.asarray(lam, dtype=complex)
        e = self.K * np.exp(-lam * self.tau)
        return np.polyval(self._pc, lam) + e, np.polyval(self._dpc, lam) - self.tau * e

    def local_scale(self, lam):
        """Magnitude of the summed terms: the rounding-noise floor of eval."""
        lam = np.asarray(lam, dtype=complex)
        mag = np.polyval(np.abs(self._pc), np.abs(lam))
        return mag + self.K * np.exp(-lam.real * self.tau)

    def root_bounds(self, re_min):
        """(re_max, im_max) such that no root lies beyond them for Re >= re_min."""
        mu_max = max(self.mu)
        reach = (self.K * math.exp(-re_min * self.tau)) ** (1.0 / self.n)
        return self.K ** (1.0 / self.n) + 1.0, mu_max + reach + 1.0


def _adjugate(M):
    n = M.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    adj = np.empty_like(M)
    idx = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = M[np.ix_(idx != i, idx != j)]
            adj[j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


@dataclass(frozen=True, eq=False)
class GeneralCharFunction:
    """chi(lam) = det(lam I - A - B exp(-lam tau)) with a single delayed entry."""

    A: np.ndarray
    B: np.ndarray
    tau: float

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        nz = np.argwhere(B != 0.0)
        if nz.shape[0] != 1 or tuple(nz[0]) != (A.shape[0] - 1, 0):
            raise InputError("delayed matrix must have its single entry at (n-1, 0)")

    @property
    def n(self):
        return self.A.shape[0]

    def delta(self, lam):
        n = self.n
        return lam * np.eye(n) - self.A - self.B * np.exp(-lam * self.tau)

    def delta_prime(self, lam):
        return np.eye(self.n) + self.tau * np.exp(-lam * self.tau) * self.B

    def eval(self, lam):
        lam = np.asarray(lam, dtype=complex)
        if lam.ndim == 0:
            return np.linalg.det(self.delta(complex(lam)))
        return np.array([np.linalg.det(self.delta(z)) for z in lam.ravel()]).reshape(lam.shape)

    def eval_with_deriv(self, lam):
        lam = np.asarray(lam, dtype=complex)
        scalar = lam.ndim == 0
        zs = np.atleast_1d(lam)
        vals = np.empty(zs.shape, dtype=complex)
        ders = np.empty(zs.shape, dtype=complex)
        for i, z in enumerate(zs.ravel()):
            D = self.delta(complex(z))
            vals.ravel()[i] = np.linalg.det(D)
            ders.ravel()[i] = np.trace(_adjugate(D) @ self.delta_prime(complex(z)))
        if scalar:
            return complex(vals[0]), complex(ders[0])
        return vals, ders

    def local_scale(self, lam):
        """Hadamard row bound of the characteristic matrix: det noise floor."""
        lam = np.asarray(lam, dtype=complex)
        scalar = lam.ndim == 0
        zs = np.atleast_1d(lam)
        out = np.empty(zs.shape, dtype=float)
        n = self.n
        for i, z in enumerate(zs.ravel()):
            M = (
                np.abs(z) * np.eye(n)
                + np.abs(self.A)
                + np.abs(self.B) * math.exp(-z.real * self.tau)
            )
            out.ravel()[i] = float(np.prod(np.sum(M, axis=1)))
        return float(out[0]) if scalar else out

    def root_bounds(self, re_min):
        bound = (
            np.linalg.norm(self.A, np.inf)
            + np.linalg.norm(self.B, np.inf) * math.exp(abs(re_min) * self.tau)
            + 1.0
        )
        return bound, bound


def char_function(system, variant="auto"):
    """Characteristic function of a system's linearization at zero.

    ``variant='unidirectional'`` gives the product-plus-exponential form
    (available when there are no previous-neighbour couplings);
    ``variant='general'`` the determinant form.
    """
    loop = as_loop(system)
    uni_ok = all(p is None for p in loop.prev_nl)
    if variant == "auto":
        variant = "unidirectional" if uni_ok else "general"
    if variant == "unidirectional":
        if not uni_ok:
            raise InputError("system has previous-neighbour couplings")
        return UniCharFunction(tuple(float(v) for v in loop.mu), loop.loop_gain(), loop.tau)
    A, B = loop.linearization()
    return GeneralCharFunction(A, B, loop.tau)


def char_eval(cf, lam):
    """(chi(lam), chi'(lam)) for either characteristic-function variant."""
    return cf.eval_with_deriv(lam)


# ---------------------------------------------------------------------------
# argument-principle root finding
# ---------------------------------------------------------------------------


class _BoundaryNearRoot(Exception):
    pass


def _winding(cf, rect):
    """Winding number of chi around the rectangle boundary (adaptive sampling).

    Segments are refined until their length is small against |chi / chi'| at
    both endpoints; since that quotient bounds the distance to the nearest
    root, the phase cannot silently wrap a full turn between samples.  A
    boundary point where |chi| sinks to the rounding-noise floor of the
    evaluation makes the phase meaningless; that raises _BoundaryNearRoot and
    the caller perturbs the rectangle.
    """
    re0, re1, im0, im1 = rect
    corners = [re0 + 1j * im0, re1 + 1j * im0, re1 + 1j * im1, re0 + 1j * im1]
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        pts.append(np.linspace(a, b, 17)[:-1])
    z = np.concatenate(pts + [pts[0][:1]])
    vals, ders = cf.eval_with_deriv(z)
    for _ in range(80):
        if np.any(np.abs(vals) < 1e-11 * cf.local_scale(z)):
            raise _BoundaryNearRoot
        dphi = np.angle(vals[1:] / vals[:-1])
        mag = np.abs(vals)
        ratio = mag[1:] / mag[:-1]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            reach = np.abs(vals) / np.abs(ders)  # lower bound proxy: root distance
        reach = np.where(np.isfinite(reach), reach, np.inf)
        seg = np.abs(np.diff(z))
        bad = (
            (np.abs(dphi) > 0.8 * math.pi)
            | (ratio > 4.0)
            | (ratio < 0.25)
            | (seg > 0.4 * np.minimum(reach[1:], reach[:-1]))
        )
        if not np.any(bad):
            total = float(np.sum(dphi))
            w = total / (2.0 * math.pi)
            if abs(w - round(w)) > 1e-3:
                raise _BoundaryNearRoot
            return int(round(w))
        if z.size > 400000:
            raise _BoundaryNearRoot
        mids = 0.5 * (z[:-1][bad] + z[1:][bad])
        midvals, midders = cf.eval_with_deriv(mids)
        insert_at = np.flatnonzero(bad) + 1
        z = np.insert(z, insert_at, mids)
        vals = np.insert(vals, insert_at, midvals)
        ders = np.insert(ders, insert_at, midders)
    raise _BoundaryNearRoot


def _newton(cf, z0, rect):
    re0, re1, im0, im1 = rect
    diag = math.hypot(re1 - re0, im1 - im0) + 1e-30
    z = complex(z0)
    for _ in range(80):
        f, df = cf.eval_with_deriv(z)
        if df == 0:
            return None
        dz = f / df
        z = z - dz
        if abs(z - z0) > 4 * diag:
            return None
        if abs(dz) <= 1e-15 * (1.0 + abs(z)):
            return z
    return None


def _rel_residual(cf, z) -> float:
    return float(abs(cf.eval(z)) / cf.local_scale(z))


@dataclass(frozen=True)
class RootInfo:
    lam: complex
    multiplicity: int
    residual: float
    merged: bool = False

    def to_json(self):
        return {
            "re": self.lam.real,
            "im": self.lam.imag,
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "merged": self.merged,
        }


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Roots in a window, ordered real parts, and the leading-pair summary."""

    window: tuple
    roots: tuple
    sigma: np.ndarray  # real parts, multiplicity expanded, descending
    leading: dict
    a1_holds: bool

    def root_count(self) -> int:
        return int(sum(r.multiplicity for r in self.roots))

    def to_json(self):
        return {
            "window": list(self.window),
            "roots": [r.to_json() for r in self.roots],
            "sigma": [float(s) for s in self.sigma],
            "leading": self.leading,
            "a1_holds": self.a1_holds,
        }


def _inside(z, rect, slack):
    re0, re1, im0, im1 = rect
    return (re0 - slack <= z.real <= re1 + slack) and (im0 - slack <= z.imag <= im1 + slack)


def _subdivide(cf, rect, count, out, depth=0):
    """Recurse on a rectangle whose boundary is root-free and holds ``count`` roots.

    Split coordinates are perturbed deterministically until both child
    boundaries are clean and the child counts sum to the parent's, so every
    root is attributed to exactly one cell.
    """
    if count == 0:
        return
    re0, re1, im0, im1 = rect
    width = max(re1 - re0, im1 - im0)
    slack = 1e-9 * (1.0 + width)
    if count == 1:
        starts = [
            complex(0.5 * (re0 + re1), 0.5 * (im0 + im1)),
            complex(0.75 * re0 + 0.25 * re1, 0.75 * im0 + 0.25 * im1),
            complex(0.25 * re0 + 0.75 * re1, 0.25 * im0 + 0.75 * im1),
        ]
        for z0 in starts:
            z = _newton(cf, z0, rect)
            if z is not None and _inside(z, rect, slack):
                out.append(RootInfo(z, 1, _rel_residual(cf, z)))
                return
    if width < 1e-8 or depth > 80:
        center = complex(0.5 * (re0 + re1), 0.5 * (im0 + im1))
        z = _newton(cf, center, rect)
        z = z if z is not None and _inside(z, rect, 10 * width) else center
        out.append(RootInfo(z, count, _rel_residual(cf, z), merged=count > 1))
        return
    horizontal = re1 - re0 >= im1 - im0
    lo, hi = (re0, re1) if horizontal else (im0, im1)
    for k in (0, 1, -1, 2, -2, 3, -3, 5, -5):
        mid = lo + (0.5 + 0.007 * k) * (hi - lo)
        if horizontal:
            halves = ((re0, mid, im0, im1), (mid, re1, im0, im1))
        else:
            halves = ((re0, re1, im0, mid), (re0, re1, mid, im1))
        try:
            counts = [_winding(cf, h) for h in halves]
        except _BoundaryNearRoot:
            continue
        if sum(counts) == count:
            for h, c in zip(halves, counts):
                _subdivide(cf, h, c, out, depth + 1)
            return
    # could not split cleanly: report the cell as one merged cluster
    center = complex(0.5 * (re0 + re1), 0.5 * (im0 + im1))
    out.append(RootInfo(center, count, _rel_residual(cf, center), merged=True))


def _merge_close(roots, tol=1e-8):
    merged = []
    for r in sorted(roots, key=lambda r: (r.lam.real, r.lam.imag)):
        if merged and abs(merged[-1].lam - r.lam) < tol * (1.0 + abs(r.lam)):
            prev = merged.pop()
            merged.append(
                RootInfo(
                    0.5 * (prev.lam + r.lam),
                    prev.multiplicity + r.multiplicity,
                    max(prev.residual, r.residual),
                    merged=True,
                )
            )
        else:
            merged.append(r)
    return merged


def _leading_summary(roots):
    if not roots:
        return {"type": "empty"}, False
    sigma0 = max(r.lam.real for r in roots)
    at_top = [r for r in roots if r.lam.real >= sigma0 - 1e-9]
    complex_top = [r for r in at_top if abs(r.lam.imag) > 1e-9]
    if not complex_top:
        return {"type": "leading real", "sigma0": sigma0}, False
    lam = max((r.lam for r in complex_top), key=lambda z: z.imag)
    pair_members = [r for r in at_top if abs(abs(r.lam.imag) - lam.imag) <= 1e-9]
    simple = all(r.multiplicity == 1 and not r.merged for r in pair_members)
    unique = len(at_top) == len(pair_members) <= 2 and simple
    holds = bool(sigma0 > 0 and lam.imag > 0 and unique)
    return {"type": "pair", "sigma0": sigma0, "omega": lam.imag}, holds


def find_roots(cf, window, tol=1e-9) -> SpectrumReport:
    """All characteristic roots in a rectangular window.

    Recursive rectangle subdivision counts roots by the argument principle
    (boundary phase tracking) until each cell isolates one root, which Newton
    then polishes; clusters that will not separate are flagged as merged
    multiple roots.  Roots are reported closed under conjugation: windows
    reaching below the real axis are analyzed on the upper half and mirrored.
    """
    re0, re1, im0, im1 = (float(v) for v in window)
    if re0 >= re1 or im0 >= im1:
        raise InputError("window must be a nondegenerate rectangle")
    if im1 <= 0.0:
        # entirely below the axis: analyze the reflection and conjugate back
        upper = find_roots(cf, (re0, re1, -im1, -im0), tol)
        roots = tuple(
            RootInfo(r.lam.conjugate(), r.multiplicity, r.residual, r.merged)
            for r in upper.roots
        )
        leading, holds = _leading_summary(roots)
        return SpectrumReport(
            (re0, re1, im0, im1), roots, upper.sigma.copy(), leading, holds
        )
    strip = max(1e-6, 1e-6 * max(abs(im0), abs(im1)))
    mirror = im0 < 0
    # conjugate symmetry: analyze the upper half up to the tallest extent of
    # the request, then mirror candidates back into the requested window
    im_lo = -strip if mirror else im0
    im_hi = max(im1, -im0)
    found = None
    for attempt in range(8):
        grow = attempt * 1e-3 * max(re1 - re0, im_hi - im_lo)
        rect = (re0 - grow, re1 + grow, im_lo - grow, im_hi + grow)
        try:
            count = _winding(cf, rect)
        except _BoundaryNearRoot:
            continue
        found = []
        _subdivide(cf, rect, count, found)
        break
    if found is None:
        raise InputError("window boundary keeps hitting roots; perturb the window")
    found = _merge_close(found)
    roots = []
    for r in found:
        lam = r.lam
        if abs(lam.imag) <= 1e-9 * (1 + abs(lam)):
            lam = complex(lam.real, 0.0)
        candidates = [lam]
        if mirror and lam.imag > strip:
            candidates.append(lam.conjugate())
        for cand in candidates:
            if im0 - 1e-12 <= cand.imag <= im1 + 1e-12:
                roots.append(RootInfo(cand, r.multiplicity, r.residual, r.merged))
    roots.sort(key=lambda r: (-r.lam.real, abs(r.lam.imag), r.lam.imag))
    sigma = np.array([r.lam.real for r in roots for _ in range(r.multiplicity)])
    leading, holds = _leading_summary(roots)
    return SpectrumReport((re0, re1, im0, im1), tuple(roots), sigma, leading, holds)


# ---------------------------------------------------------------------------
# borders of the loop gain
# ---------------------------------------------------------------------------


def critical_frequency(mu, tau) -> float:
    """Unique omega in (0, pi/tau) with pi - omega tau = sum_j arctan(omega / mu_j).

    The left side falls strictly from pi to 0 while the right side grows from
    0, so bisection cannot fail.
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0) or tau <= 0:
        raise InputError("requires all mu > 0 and tau > 0")

    def f(w):
        return math.pi - w * tau - float(np.sum(np.arctan(w / mu)))

    lo, hi = 0.0, math.pi / tau
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def stability_border(mu, tau) -> float:
    """Loop gain above which roots with positive real part exist."""
    mu = np.asarray(mu, dtype=float)
    w = critical_frequency(mu, tau)
    return float(np.prod(np.sqrt(w * w + mu * mu)))


def oscillation_border(mu, tau) -> float:
    """Largest loop gain at which a real (negative) root still exists.

    Equals the maximum of -p(x) exp(x tau) over x <= 0 with
    p(x) = prod (x + mu_j); zero when p >= 0 on the negative axis.  The
    maximizer is located by a dense sign scan of the stationarity condition
    p'(x) + tau p(x) = 0 on every interval where p < 0, refined by bisection.
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0) or tau <= 0:
        raise InputError("requires all mu > 0 and tau > 0")
    pc = np.poly(-mu)
    dpc = np.polyder(pc)

    def h(x):
        return -np.polyval(pc, x) * np.exp(x * tau)

    def q(x):
        return np.polyval(dpc, x) + tau * np.polyval(pc, x)

    # intervals between distinct roots of p where p < 0
    distinct = sorted(set(float(-v) for v in mu), reverse=True)
    best = 0.0
    intervals = []
    for left, right in zip(distinct[1:], distinct[:-1]):
        if np.polyval(pc, 0.5 * (left + right)) < 0:
            intervals.append((left, right))
    lo = distinct[-1]
    if np.polyval(pc, lo - 1.0) < 0:
        # unbounded tail: extend left until the exponential has killed h
        x = lo - 1.0
        while h(x) > max(best, 1e-30) * 1e-30 and lo - x < 1e6:
            x = lo - 2.0 * (lo - x)
        intervals.append((x, lo))
    for a, b in intervals:
        xs = np.linspace(a, b, 2050)[1:-1]
        qs = q(xs)
        best = max(best, float(np.max(h(xs))))
        flips = np.flatnonzero(np.sign(qs[1:]) * np.sign(qs[:-1]) < 0)
        for i in flips:
            xa, xb = xs[i], xs[i + 1]
            qa = qs[i]
            while xb - xa > 1e-12:
                xm = 0.5 * (xa + xb)
                qm = q(xm)
                if qm == 0.0:
                    xa = xb = xm
                elif (qm > 0) == (qa > 0):
                    xa, qa = xm, qm
                else:
                    xb = xm
            best = max(best, float(h(0.5 * (xa + xb))))
    return max(best, 0.0)


# ---------------------------------------------------------------------------
# leading-pair verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class A1Report:
    a1_holds: bool
    reason: str
    sigma0: float | None
    omega: float | None
    spectrum: SpectrumReport

    @property
    def lam(self) -> complex:
        if not self.a1_holds:
            raise MultipleEigenvalueError(f"no simple unstable leading pair: {self.reason}")
        return complex(self.sigma0, self.omega)

    def to_json(self):
        return {
            "a1_holds": self.a1_holds,
            "reason": self.reason,
            "sigma0": self.sigma0,
            "omega": self.omega,
        }


def verify_a1(cf, margin=1.0, tol_gap=1e-9) -> A1Report:
    """Check for a unique simple unstable conjugate pair leading the spectrum.

    All roots with real part >= -margin are located; the check passes iff the
    maximal real part is positive, attained by exactly one simple conjugate
    pair with nonzero frequency, and separated from the rest by tol_gap.
    """
    re_max, im_max = cf.root_bounds(-margin)
    report = find_roots(cf, (-margin, re_max, -im_max, im_max))
    roots = report.roots
    if not roots:
        return A1Report(False, "no roots in the inspected strip", None, None, report)
    sigma0 = max(r.lam.real for r in roots)
    top = [r for r in roots if r.lam.real >= sigma0 - tol_gap]
    complex_top = [r for r in top if r.lam.imag > tol_gap]
    if sigma0 <= 0:
        return A1Report(False, "leading real part is not positive", sigma0, None, report)
    if not complex_top:
        return A1Report(False, "leading root is real", sigma0, None, report)
    lam = complex_top[0].lam
    pair = [r for r in top if abs(abs(r.lam.imag) - lam.imag) <= tol_gap]
    others = [r for r in top if r not in pair]
    if others or len(complex_top) > 1:
        return A1Report(False, "leading real part shared by several pairs", sigma0, lam.imag, report)
    if any(r.multiplicity != 1 or r.merged for r in pair):
        return A1Report(False, "leading pair is a multiple root", sigma0, lam.imag, report)
    return A1Report(True, "", sigma0, lam.imag, report)


# ---------------------------------------------------------------------------
# planar spectral projection
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Linearization:
    A: np.ndarray
    B: np.ndarray
    tau: float

    @classmethod
    def of(cls, system):
        loop = as_loop(system)
        A, B = loop.linearization()
        return cls(A, B, loop.tau)

    @property
    def n(self):
        return self.A.shape[0]

    def delta(self, lam):
        return lam * np.eye(self.n) - self.A - self.B * np.exp(-lam * self.tau)

    def delta_prime(self, lam):
        return np.eye(self.n) + self.tau * np.exp(-lam * self.tau) * self.B


class SpectralProjector:
    """Coordinates of states in the plane spanned by a simple root's eigenpair.

    The right and left null vectors u, v of the characteristic matrix at lam
    are normalized so that the pairing v . delta'(lam) . u equals 1; then the
    sampled eigenfunctions themselves get coordinates exactly (1, 0)
    and (0, 1), and the map is linear in the state.
    """

    def __init__(self, lin: Linearization, lam: complex):
        self.lin = lin
        self.lam = complex(lam)
        D = lin.delta(self.lam)
        U, s, Vh = np.linalg.svd(D)
        if s[-1] > 1e-8 * s[0]:
            raise MultipleEigenvalueError(f"lam = {lam} is not a characteristic root")
        if len(s) > 1 and s[-2] <= 1e-8 * s[0]:
            raise MultipleEigenvalueError(f"rank deficiency exceeds 1 at lam = {lam}")
        u = Vh[-1].conj()
        imax = int(np.argmax(np.abs(u)))
        u = u * (u[imax].conj() / abs(u[imax]))  # fixed phase, deterministic
        u = u / np.max(np.abs(u))
        v = U[:, -1].conj()
        pairing = v @ (lin.delta_prime(self.lam) @ u)
        v = v / pairing
        self.u = u
        self.v = v
        self._weights = {}

    def _hist_weights(self, m):
        """Linear functional over (history values, history derivatives).

        Composite Simpson of phi(theta) exp(-lam (theta + tau)) with segment
        midpoints supplied by the cubic Hermite data.
        """
        if m in self._weights:
            return self._weights[m]
        tau = self.lin.tau
        h = tau / m
        theta = np.linspace(-tau, 0.0, m + 1)
        e_node = np.exp(-self.lam * (theta + tau))
        e_mid = np.exp(-self.lam * (theta[:-1] + 0.5 * h + tau))
        wv = np.zeros(m + 1, dtype=complex)
        wd = np.zeros(m + 1, dtype=complex)
        wv += (h / 6.0) * e_node
        wv[1:-1] += (h / 6.0) * e_node[1:-1]
        wv[:-1] += (4.0 * h / 6.0) * e_mid * 0.5
        wv[1:] += (4.0 * h / 6.0) * e_mid * 0.5
        wd[:-1] += (4.0 * h / 6.0) * e_mid * (h / 8.0)
        wd[1:] -= (4.0 * h / 6.0) * e_mid * (h / 8.0)
        self._weights[m] = (wv, wd)
        return wv, wd

    def _complex_coord(self, state: SystemState) -> complex:
        wv, wd = self._hist_weights(state.m)
        bN = self.lin.B[self.lin.n - 1, 0]
        hist = np.dot(wv, state.hist_vals) + np.dot(wd, state.hist_ders)
        return complex(self.v @ state.head() + self.v[-1] * bN * hist)

    def coords(self, state: SystemState) -> np.ndarray:
        """(c1, c2) with state projection = c1 Re(eigfun) + c2 Im(eigfun)."""
        c = self._complex_coord(state)
        return np.array([2.0 * c.real, -2.0 * c.imag])

    def coords_trajectory(self, traj) -> np.ndarray:
        """Coordinates at every node t >= 0 of a trajectory, vectorized."""
        m = traj.m
        wv, wd = self._hist_weights(m)
        vals = traj.values
        ders = traj.derivatives
        hist = (
            np.convolve(vals[:, 0], wv[::-1], mode="valid")
            + np.convolve(ders[:, 0], wd[::-1], mode="valid")
        )
        bN = self.lin.B[self.lin.n - 1, 0]
        c = vals[m:] @ self.v + self.v[-1] * bN * hist
        return np.column_stack([2.0 * c.real, -2.0 * c.imag])

    def eigenstate(self, m, c1=1.0, c2=0.0) -> SystemState:
        """Sampled state c1 Re(eigfun) + c2 Im(eigfun) on an m-node grid."""
        tau = self.lin.tau
        theta = np.linspace(-tau, 0.0, m + 1)
        w = complex(c1, -c2)
        ph = np.exp(self.lam * theta)
        hv = (w * ph * self.u[0]).real
        hd = (w * self.lam * ph * self.u[0]).real
        tail = (w * self.u[1:]).real
        return SystemState(tau, hv, hd, tail)


def plane_coordinates(state: SystemState, lin, lam) -> np.ndarray:
    """One-shot planar coordinates of a state for a verified simple root."""
    if not isinstance(lin, Linearization):
        lin = Linearization.of(lin)
    return SpectralProjector(lin, lam).coords(state)
