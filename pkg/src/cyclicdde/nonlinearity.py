"""The closed family of monotone coupling nonlinearities.

Every kind is defined on the whole real line, is C^1, and has a derivative of
one fixed sign, so feedback signs of a system built from them are decidable by
construction.  The saturating Hill profiles equal the classical forms
x**nu / (1 + x**nu) and 1 / (1 + x**nu) for x >= 0 and are continued to x < 0
by point reflection through their value at 0, which keeps them strictly
monotone and bounded.

Instances are frozen dataclasses; all evaluation methods are pure and accept
scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

KINDS = ("linear_gain", "tanh_sigmoid", "hill_increasing", "hill_decreasing", "shifted_hill")

# integer codes shared with the stepping kernels
CODE = {kind: i for i, kind in enumerate(KINDS)}
CODE_NONE = -1


_TINY = 5e-324  # smallest subnormal: keeps a strict sign through underflow


def hill_profile(y, nu):
    """Increasing Hill profile on [0, inf), odd-reflected to the real line.

    Equals y**nu / (1 + y**nu) for y >= 0; range over R is (-1, 1).
    """
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        a = np.abs(y) ** nu
    v = np.where(np.isfinite(a), a / (1.0 + a), 1.0)
    return np.sign(y) * v


def hill_profile_deriv(y, nu):
    """Derivative of :func:`hill_profile`; even in y and strictly positive off 0.

    Saturated tails whose true (positive) value underflows are reported as the
    smallest positive float so that sign checks remain strict.
    """
    a = np.abs(np.asarray(y, dtype=float))
    with np.errstate(over="ignore", invalid="ignore"):
        an = a**nu
        d = nu * a ** (nu - 1.0) / (1.0 + an) ** 2
    d = np.where(np.isfinite(d), d, 0.0)
    return np.maximum(d, _TINY)


@dataclass(frozen=True)
class Nonlinearity:
    """One monotone coupling term g(x).

    kind
        one of ``KINDS``.
    gain
        output amplitude (may be negative; its sign flips the monotonicity).
    slope
        input scale (1/units of x); may be negative.
    nu
        Hill exponent, >= 1 (Hill kinds only).
    shift
        inner-argument offset used by ``shifted_hill`` for zero-centering
        after an equilibrium translation.
    """

    kind: str
    gain: float = 1.0
    slope: float = 1.0
    nu: float = 2.0
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown nonlinearity kind {self.kind!r}")
        if not all(np.isfinite([self.gain, self.slope, self.nu, self.shift])):
            raise InputError("nonlinearity parameters must be finite")
        if self.gain == 0.0 or self.slope == 0.0:
            raise InputError("gain and slope must be nonzero")
        if self.kind in ("hill_increasing", "hill_decreasing", "shifted_hill") and self.nu < 1.0:
            raise InputError("Hill exponent must be >= 1")

    # -- evaluation ----------------------------------------------------

    def value(self, x):
        x = np.asarray(x, dtype=float)
        g, k = self.gain, self.slope
        if self.kind == "linear_gain":
            return g * k * x
        if self.kind == "tanh_sigmoid":
            return g * np.tanh(k * x)
        if self.kind == "hill_increasing":
            return g * hill_profile(k * x, self.nu)
        if self.kind == "hill_decreasing":
            return g * (1.0 - hill_profile(k * x, self.nu))
        # shifted_hill: vanishes at x = 0 exactly
        c0 = hill_profile(self.shift, self.nu)
        return g * (hill_profile(k * x + self.shift, self.nu) - c0)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        g, k = self.gain, self.slope
        if self.kind == "linear_gain":
            return np.full_like(x, g * k)
        if self.kind == "tanh_sigmoid":
            t = np.tanh(k * x)
            sech2 = np.maximum(1.0 - t * t, _TINY)  # strict sign through underflow
            return g * k * sech2
        if self.kind == "hill_increasing":
            return g * k * hill_profile_deriv(k * x, self.nu)
        if self.kind == "hill_decreasing":
            return -g * k * hill_profile_deriv(k * x, self.nu)
        return g * k * hill_profile_deriv(k * x + self.shift, self.nu)

    def __call__(self, x):
        return self.value(x)

    # -- structural facts ----------------------------------------------

    @property
    def derivative_sign(self) -> int:
        """+1 for increasing kinds, -1 for decreasing (exact, from parameters)."""
        s = np.sign(self.gain * self.slope)
        if self.kind == "hill_decreasing":
            s = -s
        return int(s)

    @property
    def is_bounded(self) -> bool:
        return self.kind != "linear_gain"

    def limits(self):
        """(limit at -inf, limit at +inf); ``None`` for the unbounded kind."""
        if self.kind == "linear_gain":
            return None
        g = self.gain
        s = 1.0 if self.slope > 0 else -1.0
        if self.kind == "tanh_sigmoid" or self.kind == "hill_increasing":
            lo, hi = -g * s, g * s
        elif self.kind == "hill_decreasing":
            lo, hi = g * (1.0 + s), g * (1.0 - s)
        else:  # shifted_hill
            c0 = float(hill_profile(self.shift, self.nu))
            lo, hi = g * (-s - c0), g * (s - c0)
        return float(lo), float(hi)

    # -- kernel packing -------------------------------------------------

    def kernel_params(self):
        """(code, gain, slope, nu, shift, base) tuple consumed by the kernels."""
        base = float(hill_profile(self.shift, self.nu)) if self.kind == "shifted_hill" else 0.0
        return (CODE[self.kind], self.gain, self.slope, self.nu, self.shift, base)

    # -- serialization ---------------------------------------------------

    def to_json(self):
        return {
            "kind": self.kind,
            "gain": self.gain,
            "slope": self.slope,
            "nu": self.nu,
            "shift": self.shift,
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise InputError("nonlinearity spec must be an object")
        unknown = set(obj) - {"kind", "gain", "slope", "nu", "shift"}
        if unknown:
            raise InputError(f"unknown nonlinearity fields: {sorted(unknown)}")
        if "kind" not in obj:
            raise InputError("nonlinearity spec requires 'kind'")
        kw = {k: float(obj[k]) for k in ("gain", "slope", "nu", "shift") if k in obj}
        return cls(kind=str(obj["kind"]), **kw)


def linear(gain):
    return Nonlinearity("linear_gain", gain=gain, slope=1.0)


def tanh(gain, slope=1.0):
    return Nonlinearity("tanh_sigmoid", gain=gain, slope=slope)
