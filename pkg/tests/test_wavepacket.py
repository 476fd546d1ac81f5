import math
from dataclasses import replace

import numpy as np
import pytest

from ghatom.errors import InputError, PeakOnBoundary, ZeroAmplitude
from ghatom.params import ScaledParams
from ghatom.wavepacket import (
    PacketSpec,
    default_times,
    measure_peak,
    measure_shift,
    node_amplitudes,
    predicted_shift,
    shift_report,
    synthesize,
)


def free(theta_deg=45.0):
    return ScaledParams(omega=0.0, theta=math.radians(theta_deg))


def test_no_coupling_no_reflection():
    p = free()
    spec = PacketSpec(sigma_k=0.05)
    nodes = node_amplitudes(p, spec, "R")
    assert not np.any(nodes.weights)
    field = synthesize(p, spec, "R", default_times(p, spec)[0], nodes=nodes)
    assert np.abs(field.values).max() == 0
    with pytest.raises(ZeroAmplitude):
        measure_shift(p, spec, "R")


@pytest.mark.parametrize("sigma", [0.05, 0.015])
def test_free_transmission_geometric_shift(sigma):
    p = free()
    (row,) = shift_report(p, PacketSpec(sigma_k=sigma), ("T",))
    assert row.y_measured == pytest.approx(6.0, rel=0.02)
    assert row.dt_measured == pytest.approx(6 / (2 * 3 / math.sqrt(2)), rel=0.02)


def test_mirror_symmetry():
    p = ScaledParams(k_L=0.0, delta_L=40.0, theta=math.radians(30))
    ys = []
    for sign in (1, -1):
        spec = PacketSpec(sigma_k=0.05, center=(p.k, sign * p.theta))
        _, y, _ = measure_shift(p, spec, "T")
        ys.append(y)
    assert ys[0] == pytest.approx(-ys[1], rel=1e-6)


def test_quadrature_converged():
    p = ScaledParams(delta_L=40.0, theta=math.radians(30))
    a = measure_shift(p, PacketSpec(sigma_k=0.05, modes=48), "R")
    b = measure_shift(p, PacketSpec(sigma_k=0.05, modes=96), "R")
    width = PacketSpec(sigma_k=0.05).width
    assert abs(a[1] - b[1]) < 0.01 * width


def test_norm_conserved_lossless_closed_channel():
    # gamma = 0 and a closed excited channel: |R1|^2 + |T1|^2 = 1 at every node
    p = ScaledParams(gamma=0.0, delta_L=-100.0, theta=math.radians(20))
    spec = PacketSpec(sigma_k=0.05)
    nodes = node_amplitudes(p, spec, "T")
    norms = []
    for t in default_times(p, spec):
        f = synthesize(p, spec, "T", t, nodes=nodes)
        dx, dy = f.x[1] - f.x[0], f.y[1] - f.y[0]
        norms.append(f.intensity.sum() * dx * dy)
    assert norms[1] == pytest.approx(norms[0], rel=0.01)


def test_narrow_band_convergence_blue():
    # shrinking sigma_k moves the packet shift towards stationary phase
    p = ScaledParams(delta_L=200.0, theta=math.radians(21.1826))
    pred = predicted_shift(p, "R")[1]
    errs = []
    for sigma in (0.015, 0.0075):
        _, y, _ = measure_shift(p, PacketSpec(sigma_k=sigma), "R")
        errs.append(abs(y - pred) / abs(pred))
    assert errs[1] < 0.5 * errs[0]


def test_peak_outside_lattice():
    p = free()
    spec = PacketSpec(sigma_k=0.05)
    t = default_times(p, spec)[0]
    far = np.linspace(1e4, 1e4 + 50, 64)
    field = synthesize(p, spec, "T", t, x=far, y=far)
    with pytest.raises(PeakOnBoundary):
        measure_peak(field)


def test_packet_validation():
    with pytest.raises(InputError):
        PacketSpec(sigma_k=0.05, modes=16)
    with pytest.raises(InputError):
        PacketSpec(sigma_k=0.0)
    with pytest.raises(InputError):
        # spread reaches k_x <= 0
        node_amplitudes(free(89.0), PacketSpec(sigma_k=0.5), "T")
    with pytest.raises(InputError):
        synthesize(free(), PacketSpec(sigma_k=0.05), "T", -1.0)


def test_origin_override():
    p = free(30.0)
    spec = PacketSpec(sigma_k=0.05)
    shifted = replace(spec, origin=(-400.0, 10.0))
    dt, y, _ = measure_shift(p, shifted, "T")
    assert y == pytest.approx(2 * 1.5 * 6 / (2 * 3 * math.cos(math.radians(30))), rel=0.02)


def test_red_resonance_converges_below_its_width():
    # the red resonances are ~4e-4 wide in k; packets narrower than that
    # reproduce the large negative stationary-phase shift
    p = ScaledParams(delta_L=-100.0, theta=math.radians(31.79539))
    pred = predicted_shift(p, "R")[1]
    assert pred < -2000
    errs = []
    for sigma in (5e-5, 1.5e-5):
        _, y, _ = measure_shift(p, PacketSpec(sigma_k=sigma), "R")
        errs.append(abs(y - pred) / abs(pred))
    assert errs[0] < 0.1
    assert errs[1] < 0.01
