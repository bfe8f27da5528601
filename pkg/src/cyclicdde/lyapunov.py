"""Discrete zero-counting functional on states and along trajectories.

The functional counts strict sign alternations of the sampled history
followed by the tail coordinates, rounds the count up to the nearest odd
integer, and is nonincreasing along solutions of validated negative-feedback
loops.  Its level set 1 plays the role of the slowly oscillating class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ZeroStateError
from .systems import SystemState


@dataclass(frozen=True)
class LyapunovValue:
    """Sign-change count, the odd functional value, and a saturation flag.

    ``value = count`` when the count is odd, ``count + 1`` when even.  The
    saturated flag marks counts at the grid's resolution ceiling (every
    consecutive retained pair alternates), where a finite grid cannot rule
    out further sign changes.
    """

    count: int
    value: int
    saturated: bool


def _samples(state: SystemState, zero_tol: float) -> np.ndarray:
    seq = np.concatenate((state.hist_vals, state.tail))
    scale = state.max_norm()
    if scale <= 0.0 or not np.isfinite(scale):
        raise ZeroStateError("sign-change count undefined at the zero state")
    return seq[np.abs(seq) > zero_tol * scale]


def sign_changes(state: SystemState, zero_tol: float = 1e-9) -> int:
    """Number of strict sign alternations; near-zero entries are skipped.

    The relative tolerance makes the count exactly scaling invariant.
    """
    kept = _samples(state, zero_tol)
    if kept.size < 2:
        return 0
    s = np.sign(kept)
    return int(np.sum(s[1:] != s[:-1]))


def lyapunov_value(state: SystemState, zero_tol: float = 1e-9) -> LyapunovValue:
    """The odd-valued functional; saturation means every retained pair alternates."""
    kept = _samples(state, zero_tol)
    sc = 0 if kept.size < 2 else int(np.sum(np.sign(kept)[1:] != np.sign(kept)[:-1]))
    v = sc if sc % 2 == 1 else sc + 1
    saturated = kept.size >= 2 and sc == kept.size - 1
    return LyapunovValue(sc, v, saturated)


def is_slowly_oscillating(state: SystemState, zero_tol: float = 1e-9) -> bool:
    """True iff the functional equals 1 (the lowest oscillation class)."""
    return lyapunov_value(state, zero_tol).value == 1


@dataclass(frozen=True)
class LyapunovSeries:
    times: np.ndarray
    counts: np.ndarray
    values: np.ndarray
    saturated: np.ndarray
    nonincreasing: bool
    truncated: bool  # the trajectory came within zero tolerance of the origin

    def __len__(self):
        return self.times.size

    def to_csv(self, path_or_file):
        rows = ["t,sc,v,saturated"]
        for t, sc, v, sat in zip(self.times, self.counts, self.values, self.saturated):
            rows.append(f"{t:.17g},{sc},{v},{int(sat)}")
        data = "\r\n".join(rows) + "\r\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(data)
        else:
            with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
                fh.write(data)


def lyapunov_series(traj, sample_dt: float = 0.1, zero_tol: float = 1e-9) -> LyapunovSeries:
    """Functional values along a trajectory from t = 0 onward.

    Samples at the node times closest to the requested spacing (states at
    nodes are exact copies of stored data, so the series is cheap and
    deterministic).  Truncates with a marker if the state norm collapses
    toward zero relative to the trajectory's overall scale.
    """
    if traj.t_end < 0:
        raise InputError("trajectory must cover at least one delay interval")
    stride = max(1, int(round(sample_dt / traj.h)))
    scale = float(np.max(np.abs(traj.values[traj.m:])))
    ts, counts, values, sats = [], [], [], []
    truncated = False
    hv = traj.values[:, 0]
    for k in range(traj.m, traj.values.shape[0], stride):
        seq = np.concatenate((hv[k - traj.m: k + 1], traj.values[k, 1:]))
        norm = float(np.max(np.abs(seq)))
        if norm <= 1e-13 * max(scale, 1e-300):
            truncated = True
            break
        kept = seq[np.abs(seq) > zero_tol * norm]
        sc = 0 if kept.size < 2 else int(np.sum(np.sign(kept)[1:] != np.sign(kept)[:-1]))
        ts.append((k - traj.m) * traj.h)
        counts.append(sc)
        values.append(sc if sc % 2 == 1 else sc + 1)
        sats.append(kept.size >= 2 and sc == kept.size - 1)
    values_arr = np.asarray(values, dtype=int)
    return LyapunovSeries(
        np.asarray(ts),
        np.asarray(counts, dtype=int),
        values_arr,
        np.asarray(sats, dtype=bool),
        bool(np.all(np.diff(values_arr) <= 0)) if values_arr.size else True,
        truncated,
    )
