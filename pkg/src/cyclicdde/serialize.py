"""JSON system specifications (strict: unknown fields are rejected)."""

from __future__ import annotations

import json

import numpy as np

from .errors import InputError
from .nonlinearity import Nonlinearity
from .systems import CyclicSystem, GeneNetwork, UnidirectionalSystem

_FIELDS = {
    "unidirectional": {"type", "tau", "mu", "g"},
    "cyclic": {"type", "tau", "mu", "g"},
    "gene": {"type", "a", "b", "beta", "c", "nu", "f_kind", "tau_p", "tau_r"},
}


def parse_system(obj):
    """Build a system from a spec dict; raises InputError on any deviation."""
    if not isinstance(obj, dict):
        raise InputError("system spec must be a JSON object")
    kind = obj.get("type")
    if kind not in _FIELDS:
        raise InputError(f"unknown system type {kind!r}")
    unknown = set(obj) - _FIELDS[kind]
    if unknown:
        raise InputError(f"unknown fields for {kind!r} spec: {sorted(unknown)}")
    missing = _FIELDS[kind] - set(obj)
    if missing:
        raise InputError(f"missing fields for {kind!r} spec: {sorted(missing)}")
    try:
        if kind == "gene":
            return GeneNetwork(
                a=np.asarray(obj["a"], dtype=float),
                b=np.asarray(obj["b"], dtype=float),
                beta=np.asarray(obj["beta"], dtype=float),
                c=np.asarray(obj["c"], dtype=float),
                nu=np.asarray(obj["nu"], dtype=float),
                f_kind=tuple(obj["f_kind"]),
                tau_p=np.asarray(obj["tau_p"], dtype=float),
                tau_r=np.asarray(obj["tau_r"], dtype=float),
            )
        nls = tuple(Nonlinearity.from_json(g) for g in obj["g"])
        mu = np.asarray(obj["mu"], dtype=float)
        tau = float(obj["tau"])
        if kind == "unidirectional":
            return UnidirectionalSystem(mu, nls, tau)
        return CyclicSystem(mu, nls, tau)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed system spec: {exc}") from exc


def load_system(path):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc
    return parse_system(obj)


def dump_json(obj, fh=None, indent=2):
    text = json.dumps(obj, indent=indent, sort_keys=True, allow_nan=True)
    if fh is None:
        return text
    fh.write(text + "\n")
    return None
