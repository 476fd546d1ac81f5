import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ghatom.errors import InputError
from ghatom.params import (
    ScaledParams,
    cartesian_to_polar,
    derive_kinematics,
    effective_detuning,
    excited_wavevector,
    kinematics_from_components,
    polar_to_cartesian,
)


def test_defaults_are_red_detuned_config():
    p = ScaledParams()
    assert (p.gamma, p.delta_L, p.omega, p.k, p.k_L, p.L) == (1.0, -100.0, 20.0, 3.0, 8.1125, 6.0)


def test_normal_incidence_detuning():
    kin = derive_kinematics(ScaledParams())
    assert kin.delta_eff == pytest.approx(-165.8127, abs=5e-5)
    assert kin.kx == 3.0 and kin.ky == 0.0


def test_tangential_limit_detuning():
    # all of k along y: delta = -100 - 2*3*8.1125 - 8.1125^2
    kin = kinematics_from_components(ScaledParams(), 1e-9, 3.0)
    assert kin.delta_eff == pytest.approx(-214.4877, abs=5e-5)


def test_thirty_degrees():
    kin = derive_kinematics(ScaledParams(theta=math.radians(30)))
    assert kin.delta_eff == pytest.approx(-100 - 2 * 1.5 * 8.1125 - 8.1125**2, rel=1e-14)
    assert kin.Ex == pytest.approx(kin.kx**2)
    assert kin.k1 == kin.kx


def test_polar_round_trip_1000_draws():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        k = rng.uniform(0.01, 100)
        th = rng.uniform(0, math.pi / 2 - 1e-6)
        k2, th2 = cartesian_to_polar(*polar_to_cartesian(k, th))
        worst = max(worst, abs(k2 - k) / k, abs(th2 - th))
    assert worst < 1e-13


@given(st.floats(0, 89.9), st.floats(0.1, 20), st.floats(0.01, 20))
def test_detuning_decreases_with_angle(theta, k, kl):
    p = ScaledParams(k=k, k_L=kl)
    a = derive_kinematics(p.with_theta_deg(theta)).delta_eff
    b = derive_kinematics(p.with_theta_deg(min(theta + 0.05, 89.95))).delta_eff
    assert b <= a


def test_no_doppler_without_laser_momentum():
    assert effective_detuning(-100, 2.7, 0.0) == -100


@pytest.mark.parametrize("delta", [-300.0, -1.0, 0.0, 5.0, 300.0])
@pytest.mark.parametrize("gamma", [0.0, 1.0])
def test_excited_branch(delta, gamma):
    k2 = excited_wavevector(delta, gamma, 2.0)
    assert k2.imag >= 0
    assert k2 * k2 == pytest.approx(complex(delta + 4.0, gamma / 2), rel=1e-14, abs=1e-14)
    if k2.imag == 0:
        assert k2.real >= 0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"gamma": -0.1},
        {"k": 0.0},
        {"L": -1.0},
        {"theta": math.pi / 2},
        {"theta": -0.1},
        {"omega": -1.0},
        {"delta_L": float("nan")},
        {"k_L": float("inf")},
    ],
)
def test_rejects_invalid(kwargs):
    with pytest.raises(InputError):
        ScaledParams(**kwargs)


def test_input_error_is_value_error():
    with pytest.raises(ValueError):
        ScaledParams(k=-1)


def test_with_wavevector():
    p = ScaledParams().with_wavevector(1.0, 1.0)
    assert p.k == pytest.approx(math.sqrt(2))
    assert p.theta_deg == pytest.approx(45)
