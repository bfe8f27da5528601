import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclicdde import Nonlinearity
from cyclicdde.errors import InputError

SIGN_GRID = np.concatenate((-np.geomspace(1e6, 1e-6, 121), np.geomspace(1e-6, 1e6, 121)))

ALL_KINDS = [
    Nonlinearity("linear_gain", gain=2.0),
    Nonlinearity("linear_gain", gain=-0.5, slope=3.0),
    Nonlinearity("tanh_sigmoid", gain=1.0),
    Nonlinearity("tanh_sigmoid", gain=-2.0, slope=0.7),
    Nonlinearity("hill_increasing", gain=1.5, slope=2.0, nu=2.0),
    Nonlinearity("hill_decreasing", gain=1.0, slope=1.0, nu=3.0),
    Nonlinearity("shifted_hill", gain=-1.2, slope=1.0, nu=2.0, shift=0.7),
    Nonlinearity("shifted_hill", gain=0.8, slope=-1.0, nu=1.5, shift=1.3),
]


@pytest.mark.parametrize("nl", ALL_KINDS, ids=lambda nl: f"{nl.kind}/g={nl.gain}")
def test_derivative_sign_constant_on_grid(nl):
    d = nl.derivative(SIGN_GRID)
    assert np.all(np.isfinite(d))
    s = nl.derivative_sign
    assert s in (-1, 1)
    assert np.all(np.sign(d) == s)


@pytest.mark.parametrize("nl", ALL_KINDS, ids=lambda nl: nl.kind)
def test_derivative_matches_finite_difference(nl):
    # grid avoids the inner-argument origin, where the Hill profiles are C^1
    # but not C^2 and central differences converge only linearly
    x = np.linspace(-3.0, 3.0, 40) + 0.0123
    h = 1e-6
    fd = (nl.value(x + h) - nl.value(x - h)) / (2 * h)
    assert np.allclose(nl.derivative(x), fd, rtol=1e-6, atol=1e-8)


def test_zero_centered_kinds():
    assert Nonlinearity("linear_gain", gain=3.0).value(0.0) == 0.0
    assert Nonlinearity("tanh_sigmoid", gain=-2.0).value(0.0) == 0.0
    assert Nonlinearity("shifted_hill", gain=1.0, shift=0.9).value(0.0) == 0.0


def test_hill_bounded_on_nonnegative_axis():
    x = np.geomspace(1e-9, 1e9, 301)
    for kind in ("hill_increasing", "hill_decreasing"):
        nl = Nonlinearity(kind, gain=2.0, nu=2.5)
        v = nl.value(x) / nl.gain
        assert np.all(v >= 0.0) and np.all(v <= 1.0)


def test_limits_match_far_evaluation():
    for nl in ALL_KINDS:
        lim = nl.limits()
        if nl.kind == "linear_gain":
            assert lim is None
            continue
        lo, hi = lim
        assert abs(float(nl.value(-1e12)) - lo) < 1e-9
        assert abs(float(nl.value(1e12)) - hi) < 1e-9


def test_parameter_validation():
    with pytest.raises(InputError):
        Nonlinearity("nope")
    with pytest.raises(InputError):
        Nonlinearity("tanh_sigmoid", gain=0.0)
    with pytest.raises(InputError):
        Nonlinearity("hill_increasing", nu=0.5)


def test_json_round_trip():
    for nl in ALL_KINDS:
        assert Nonlinearity.from_json(nl.to_json()) == nl
    with pytest.raises(InputError):
        Nonlinearity.from_json({"kind": "tanh_sigmoid", "extra": 1})


@settings(max_examples=60, deadline=None)
@given(
    gain=st.floats(-5, 5).filter(lambda g: abs(g) > 1e-3),
    slope=st.floats(-4, 4).filter(lambda k: abs(k) > 1e-3),
    nu=st.floats(1.0, 6.0),
    shift=st.floats(-3.0, 3.0),
    x=st.floats(-50.0, 50.0),
    y=st.floats(-50.0, 50.0),
)
def test_shifted_hill_strictly_monotone(gain, slope, nu, shift, x, y):
    nl = Nonlinearity("shifted_hill", gain, slope, nu, shift)
    if x == y:
        return
    dv = float(nl.value(y)) - float(nl.value(x))
    if dv != 0.0:  # derivative may vanish at one interior point only
        assert np.sign(dv) == nl.derivative_sign * np.sign(y - x)
