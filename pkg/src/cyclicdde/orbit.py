"""Detection of the bounding periodic orbit via planar projection.

A trajectory seeded on the leading eigenplane spirals outward in projection;
its crossings of a fixed half-line give return times and radii.  Convergence
of three consecutive radii and return times declares a cycle, which is then
verified: the functional equals 1 along the orbit, the orbit sits inside the
attractor box (when one is computable), and the states one period apart
agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InsufficientDataError, UnsupportedSystemError, ValidationError
from .integrator import Trajectory, integrate
from .lyapunov import lyapunov_value
from .spectral import Linearization, SpectralProjector, char_function, verify_a1
from .steady import attractor_box
from .systems import SystemState, UnidirectionalSystem, as_loop


def _reference_scale(system) -> float:
    """Box radius when available, else 1; sets the absolute size of seeds."""
    if isinstance(system, UnidirectionalSystem):
        try:
            return attractor_box(system).radius()
        except (UnsupportedSystemError, ValidationError):
            pass
    return 1.0


def seed_on_eigenspace(system, a1_report, eps=1e-3, steps_per_delay=128) -> SystemState:
    """State eps * scale * Re(eigfun) of the leading pair.

    An order-eps approximation of a point on the unstable manifold; its
    planar coordinates are exactly (eps * scale, 0).
    """
    if eps <= 0:
        raise InputError("eps must be positive (the zero state has no functional value)")
    lam = a1_report.lam if hasattr(a1_report, "lam") else complex(a1_report)
    lin = Linearization.of(system)
    proj = SpectralProjector(lin, lam)
    return proj.eigenstate(steps_per_delay, c1=eps * _reference_scale(system), c2=0.0)


@dataclass(frozen=True)
class CrossingSequence:
    theta0: float
    orientation: int  # +1 counterclockwise, -1 clockwise
    times: np.ndarray
    radii: np.ndarray

    def __len__(self):
        return self.times.size


def _angle_of(c):
    return math.atan2(c[1], c[0])


def poincare_crossings(traj: Trajectory, projector: SpectralProjector, theta0=None,
                       t_start=None) -> CrossingSequence:
    """Crossings of the half-line at angle theta0 by the projected trajectory.

    Node-sampled planar coordinates locate the bracketing intervals; times
    and radii are refined by bisection on the angular coordinate.  The
    rotation orientation is taken from the flow itself.
    """
    tau = traj.loop.tau
    t_start = 5.0 * tau if t_start is None else float(t_start)
    coords = projector.coords_trajectory(traj)
    h = traj.h
    k0 = min(int(math.ceil(t_start / h)), coords.shape[0] - 2)
    ang = np.unwrap(np.arctan2(coords[:, 1], coords[:, 0]))
    orientation = 1 if ang[-1] >= ang[k0] else -1
    phi = orientation * ang
    if theta0 is None:
        theta0 = math.atan2(coords[k0, 1], coords[k0, 0])
    # levels phi = orientation*theta0 + 2 pi k passed with phi increasing
    base = orientation * theta0
    lev = np.floor((phi - base) / (2.0 * math.pi))
    hits = np.flatnonzero(lev[1:] > lev[:-1])
    hits = hits[hits >= k0]
    times, radii = [], []
    for i in hits:
        target = base + 2.0 * math.pi * lev[i + 1]
        ta, tb = i * h, (i + 1) * h
        fa = phi[i] - target
        for _ in range(60):
            tm = 0.5 * (ta + tb)
            cm = projector.coords(traj.state_at(tm))
            am = _angle_of(cm)
            # evaluate on the branch continuing phi at the bracket
            k_br = round((orientation * am - target) / (2.0 * math.pi))
            fm = orientation * am - 2.0 * math.pi * k_br - target
            if (fm > 0) == (fa > 0):
                ta, fa = tm, fm
            else:
                tb = tm
            if tb - ta < 1e-12 * max(1.0, tb):
                break
        tc = 0.5 * (ta + tb)
        cc = projector.coords(traj.state_at(tc))
        times.append(tc)
        radii.append(float(np.hypot(cc[0], cc[1])))
    if len(times) < 3:
        raise InsufficientDataError(
            f"only {len(times)} crossings found; extend the trajectory"
        )
    return CrossingSequence(float(theta0), orientation, np.asarray(times), np.asarray(radii))


@dataclass(frozen=True)
class OrbitReport:
    converged: bool
    period: float | None
    crossings: CrossingSequence | None
    phases: np.ndarray | None  # sample times of one period
    samples: tuple | None  # SystemState per phase
    v_equals_one: bool | None
    in_box: bool | None
    periodicity_residual: float | None
    amplitude: float | None
    message: str = ""

    def to_json(self):
        cr = (
            [[float(t), float(s)] for t, s in zip(self.crossings.times, self.crossings.radii)]
            if self.crossings is not None
            else []
        )
        return {
            "converged": self.converged,
            "period": self.period,
            "crossings": cr,
            "verification": {
                "v_equals_one": self.v_equals_one,
                "in_box": self.in_box,
                "periodicity_residual": self.periodicity_residual,
            },
            "message": self.message,
        }

    def samples_to_csv(self, path_or_file):
        n = self.samples[0].n_components if self.samples else 0
        rows = ["phase,t," + ",".join(f"x{i}" for i in range(n))]
        for ph, t, st in zip(np.linspace(0, 1, len(self.samples), endpoint=False),
                             self.phases, self.samples):
            vals = st.head()
            rows.append(",".join(f"{v:.17g}" for v in [ph, t, *vals]))
        data = "\r\n".join(rows) + "\r\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(data)
        else:
            with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
                fh.write(data)


def detect_cycle(system, seed=None, eps=1e-3, steps_per_delay=128,
                 tol_rel=1e-5, tol_T_rel=1e-4, max_horizon_periods=600,
                 margin=None, n_phases=64, zero_tol=1e-9) -> OrbitReport:
    """Integrate from an eigenplane seed until the projected spiral settles.

    Convergence requires the last three crossing radii to agree to tol_rel
    (relative) and the last return times to agree to tol_T_rel * period.
    Independent detect_cycle calls are safe to run concurrently.
    """
    loop = as_loop(system)
    cf = char_function(loop)
    if margin is None:
        margin = 1.0 + 0.5 * float(np.max(loop.mu))
    a1 = verify_a1(cf, margin=margin)
    if not a1.a1_holds:
        raise ValidationError(f"leading-pair assumption fails: {a1.reason}")
    lam = a1.lam
    lin = Linearization.of(loop)
    projector = SpectralProjector(lin, lam)
    if seed is None:
        seed = seed_on_eigenspace(system, a1, eps=eps, steps_per_delay=steps_per_delay)
    tau = loop.tau
    T_hat = 2.0 * math.pi / lam.imag
    horizon = 5.0 * tau + 30.0 * T_hat
    traj = integrate(loop, seed, horizon, steps_per_delay)
    cross = None
    while True:
        try:
            cross = poincare_crossings(traj, projector)
        except InsufficientDataError:
            cross = None
        if cross is not None and len(cross) >= 4:
            r = cross.radii
            t = cross.times
            spac = np.diff(t[-3:])
            r_ok = np.max(r[-3:]) - np.min(r[-3:]) <= tol_rel * np.max(np.abs(r[-3:]))
            T_est = float(np.mean(spac))
            t_ok = np.max(np.abs(spac - T_est)) <= tol_T_rel * T_est
            if r_ok and t_ok:
                return _verified_report(system, traj, cross, T_est, n_phases, zero_tol)
        if traj.t_end >= max_horizon_periods * T_hat:
            msg = "horizon exhausted"
            if cross is not None and len(cross.radii) >= 2:
                trend = "increasing" if cross.radii[-1] > cross.radii[0] else "decreasing"
                msg += f"; {len(cross)} crossings, radii {trend}"
            return OrbitReport(False, None, cross, None, None, None, None, None, None, msg)
        traj.extend(min(2.0 * traj.t_end, max_horizon_periods * T_hat))


def _verified_report(system, traj, cross, T, n_phases, zero_tol) -> OrbitReport:
    t1 = cross.times[-1]
    t0 = t1 - T
    phases = t0 + np.linspace(0.0, T, n_phases, endpoint=False)
    samples = tuple(traj.state_at(t) for t in phases)
    amplitude = max(s.max_norm() for s in samples)
    v_ok = all(lyapunov_value(s, zero_tol).value == 1 for s in samples)
    in_box = None
    if isinstance(system, UnidirectionalSystem):
        try:
            box = attractor_box(system)
            slack = 1e-6 * max(1.0, box.radius())
            in_box = all(
                box.contains(np.concatenate(([v], s.tail)), slack)
                for s in samples
                for v in (s.hist_vals.min(), s.hist_vals.max())
            )
        except (UnsupportedSystemError, ValidationError):
            in_box = None
    diff = traj.state_at(t0 + T) - traj.state_at(t0)
    residual = diff.max_norm() / amplitude
    return OrbitReport(
        True, T, cross, phases, samples, v_ok, in_box, float(residual), float(amplitude)
    )


@dataclass(frozen=True)
class InjectivityProbe:
    min_ratio: float
    v1_fraction: float
    n_pairs: int
    n_skipped: int


def projected_injectivity_probe(traj1: Trajectory, traj2: Trajectory,
                                projector: SpectralProjector, t_start=None,
                                n_samples=24, zero_tol=1e-9) -> InjectivityProbe:
    """Separation of projected states against separation of full states.

    Over sampled time pairs whose full states differ, reports the minimum of
    |projected difference| / |state difference| and the fraction of pairs
    whose state difference has functional value 1.
    """
    tau = traj1.loop.tau
    t_start = 2.0 * tau if t_start is None else float(t_start)
    scale = max(
        float(np.max(np.abs(traj1.values))), float(np.max(np.abs(traj2.values))), 1e-300
    )
    ts1 = np.linspace(t_start, traj1.t_end, n_samples)
    ts2 = np.linspace(t_start, traj2.t_end, n_samples)
    min_ratio = math.inf
    v1 = 0
    pairs = 0
    skipped = 0
    for ta in ts1:
        sa = traj1.state_at(ta)
        for tb in ts2:
            diff = sa - traj2.state_at(tb)
            norm = diff.max_norm()
            if norm <= 1e-9 * scale:
                skipped += 1
                continue
            pairs += 1
            c = projector.coords(diff)
            min_ratio = min(min_ratio, float(np.hypot(c[0], c[1])) / norm)
            if lyapunov_value(diff, zero_tol).value == 1:
                v1 += 1
    return InjectivityProbe(min_ratio, v1 / pairs if pairs else 0.0, pairs, skipped)
