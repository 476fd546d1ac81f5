import math
import time
from dataclasses import replace

import numpy as np
import pytest

from ghatom.errors import ZeroAmplitude
from ghatom.oracle import random_params
from ghatom.params import ScaledParams, polar_to_cartesian
from ghatom.scattering import amplitude
from ghatom.shifts import (
    critical_angle,
    delay_and_shift,
    lateral_shifts,
    phase_gradient,
    phase_of,
    unwrap_phase,
)


def dense_gradient(p, channel, h=1e-5, m=5):
    """Slope of the unwrapped phase on a 2m+1 point grid, per axis."""
    kx, ky = polar_to_cartesian(p.k, p.theta)
    steps = np.arange(-m, m + 1) * h
    out = []
    for axis in (0, 1):
        s = [amplitude(p, kx + d * (axis == 0), ky + d * (axis == 1), channel) for d in steps]
        ph = np.unwrap(np.angle(s))
        out.append(np.polyfit(steps, ph, 3)[2])
    return out, np.abs(s)


def non_resonant_points(n, seed):
    rng = np.random.default_rng(seed)
    got = []
    while len(got) < n:
        p = random_params(rng)
        ok = True
        for ch in ("R", "T"):
            try:
                g, mags = dense_gradient(p, ch)
            except ZeroAmplitude:
                ok = False
                break
            if mags.min() < 1e-6 or mags.max() / mags.min() > 1.001:
                ok = False
        if ok:
            got.append(p)
    return got


@pytest.fixture(scope="module")
def smooth_points():
    return non_resonant_points(20, seed=31)


def test_gradient_matches_dense_phase_fit(smooth_points):
    for p in smooth_points:
        for ch in ("R", "T"):
            ref, _ = dense_gradient(p, ch)
            got = phase_gradient(p, ch)
            for a, b in zip(got, ref):
                assert abs(a - b) <= 1e-6 * max(1.0, abs(b))


def test_step_halving_is_stable(smooth_points):
    for p in smooth_points:
        for ch in ("R", "T"):
            a = phase_gradient(p, ch, 1e-6)
            b = phase_gradient(p, ch, 5e-7)
            for x, y in zip(a, b):
                assert abs(x - y) <= 1e-7 * max(1.0, abs(y))


def test_no_laser_momentum_no_ky_dependence():
    p = ScaledParams(k_L=0.0, theta=math.radians(40))
    for ch in ("R", "T"):
        assert phase_gradient(p, ch)[1] == 0.0


def test_free_transmission_geometry():
    p = ScaledParams(omega=0.0, theta=math.radians(45))
    dt, y = delay_and_shift(p, phase_gradient(p, "T"))
    assert dt == pytest.approx(6 / (2 * 3 / math.sqrt(2)), rel=1e-12)
    assert dt == pytest.approx(1.4142, abs=1e-4)
    assert y == pytest.approx(6.0, rel=1e-12)


def test_zero_width_transmission_has_no_shift():
    p = replace(ScaledParams(theta=math.radians(25)), L=0.0)
    dt, y = delay_and_shift(p, phase_gradient(p, "T"))
    assert abs(dt) < 1e-9 and abs(y) < 1e-9


def test_zero_amplitude_raises():
    with pytest.raises(ZeroAmplitude):
        phase_of(0j)
    with pytest.raises(ZeroAmplitude):
        phase_gradient(ScaledParams(omega=0.0, theta=0.3), "R")


def test_lateral_shifts_fields():
    sh = lateral_shifts(ScaledParams(theta=math.radians(30)))
    assert -math.pi <= sh.theta_R <= math.pi
    assert sh.y_R == pytest.approx(2 * 1.5 * sh.dt_R - sh.dTheta_dky_R)


def test_critical_angle_blue():
    t0 = time.perf_counter()
    th = critical_angle(ScaledParams(delta_L=200.0))
    assert time.perf_counter() - t0 < 1.0
    assert math.degrees(th) == pytest.approx(69.4, abs=0.3)


def test_critical_angle_red_is_absent():
    assert critical_angle(ScaledParams(delta_L=-100.0)) is None


def test_critical_angle_tends_to_grazing():
    prev = 0.0
    for k in (3.0, 30.0, 300.0, 1e4):
        th = math.degrees(critical_angle(ScaledParams(delta_L=200.0, k_L=0.0, k=k)))
        assert th > prev
        prev = th
    assert prev > 89.9


def test_unwrap():
    ph = unwrap_phase([3.0, -3.0, -2.9])
    assert abs(ph[1] - ph[0]) < math.pi
