"""Phases, phase gradients, group delays and lateral shifts.

For a ground-state amplitude S = |S| exp(i Theta) (S = R1 or T1) the scaled
stationary-phase results are

    dt_S = (dTheta/dk_x + L) / (2 k_x)
    y_S  = 2 k_y dt_S - dTheta/dk_y

Gradients are taken in Cartesian (k_x, k_y) as Im(S'/S) from central
differences of the complex amplitude, which never sees a 2 pi wrap. Moving
k_y only changes the effective detuning; moving k_x changes k1, k2 and both
dressed rates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .dressed import eigenvalues
from .errors import MultipleRoots, StencilCrossesResonance, ZeroAmplitude
from .params import ScaledParams, effective_detuning, polar_to_cartesian
from .scattering import amplitude

ZERO_AMPLITUDE = 1e-300
DEFAULT_REL_STEP = 1e-6
# |S| may not change by more than this factor across one stencil
STENCIL_RATIO = 1e3


@dataclass(frozen=True)
class ShiftResult:
    theta_R: float
    theta_T: float
    dTheta_dkx_R: float
    dTheta_dky_R: float
    dTheta_dkx_T: float
    dTheta_dky_T: float
    dt_R: float
    dt_T: float
    y_R: float
    y_T: float


def phase_of(s: complex) -> float:
    if abs(s) < ZERO_AMPLITUDE:
        raise ZeroAmplitude(f"|S| = {abs(s):.3e}; phase undefined")
    return cmath.phase(s)


def _partial(p, kx, ky, channel, s0, h, axis):
    dx, dy = (h, 0.0) if axis == 0 else (0.0, h)
    sp = amplitude(p, kx + dx, ky + dy, channel)
    sm = amplitude(p, kx - dx, ky - dy, channel)
    mags = [abs(s0), abs(sp), abs(sm)]
    if min(mags) < ZERO_AMPLITUDE or max(mags) / min(mags) > STENCIL_RATIO:
        return None
    return ((sp - sm) / (2 * h) / s0).imag


def phase_gradient(p: ScaledParams, channel: str, rel_step: float = DEFAULT_REL_STEP) -> tuple[float, float]:
    """(dTheta/dk_x, dTheta/dk_y) of the R1 or T1 phase at ``p``.

    The step is ``rel_step * k``; it is shrunk tenfold once if the amplitude
    swings by more than three decades across the stencil.
    """
    kx, ky = polar_to_cartesian(p.k, p.theta)
    s0 = amplitude(p, kx, ky, channel)
    if abs(s0) < ZERO_AMPLITUDE:
        raise ZeroAmplitude(f"|{channel}1| = {abs(s0):.3e} at theta = {p.theta_deg:.6f} deg")
    grad = []
    for axis in (0, 1):
        h = rel_step * p.k
        g = _partial(p, kx, ky, channel, s0, h, axis)
        if g is None:
            g = _partial(p, kx, ky, channel, s0, h / 10, axis)
        if g is None:
            raise StencilCrossesResonance(
                f"|{channel}1| varies by more than {STENCIL_RATIO:g}x across the k_{'xy'[axis]} stencil"
            )
        grad.append(g)
    return grad[0], grad[1]


def delay_and_shift(p: ScaledParams, grads: tuple[float, float], channel: str | None = None) -> tuple[float, float]:
    """Return (dt_S, y_S) from the phase gradients of one channel."""
    kx, ky = polar_to_cartesian(p.k, p.theta)
    dkx, dky = grads
    dt = (dkx + p.L) / (2 * kx)
    return dt, 2 * ky * dt - dky


def lateral_shifts(p: ScaledParams, rel_step: float = DEFAULT_REL_STEP) -> ShiftResult:
    """Phases, gradients, delays and shifts for both ground-state channels."""
    kx, ky = polar_to_cartesian(p.k, p.theta)
    out = {}
    for ch in ("R", "T"):
        s = amplitude(p, kx, ky, ch)
        out["theta_" + ch] = phase_of(s)
        gx, gy = phase_gradient(p, ch, rel_step)
        out["dTheta_dkx_" + ch] = gx
        out["dTheta_dky_" + ch] = gy
        out["dt_" + ch], out["y_" + ch] = delay_and_shift(p, (gx, gy), ch)
    return ShiftResult(**out)


def _barrier_excess(p: ScaledParams, theta: float) -> float:
    """k_x^2 - Re V+ at angle theta (k fixed)."""
    kx, ky = polar_to_cartesian(p.k, theta)
    vp, _ = eigenvalues(effective_detuning(p.delta_L, ky, p.k_L), p.gamma, p.omega)
    return kx * kx - vp.real


def critical_angle(p: ScaledParams, samples: int = 2048, xtol: float = 1e-12) -> float | None:
    """Angle (radians) where the x kinetic energy equals Re V+, or None.

    Roots are bracketed on a uniform grid over [0, pi/2) and refined by
    bisection. Raises :class:`MultipleRoots` if more than one is found.
    """
    grid = np.linspace(0.0, math.pi / 2, samples + 1)
    vals = np.array([_barrier_excess(p, t) for t in grid])
    roots = []
    # a zero exactly at pi/2 (k_x = 0) is not an admissible angle
    for i in range(samples):
        a, b = vals[i], vals[i + 1]
        if a == 0:
            roots.append(float(grid[i]))
        elif a * b < 0:
            roots.append(bisect(lambda t: _barrier_excess(p, t), grid[i], grid[i + 1], xtol=xtol))
    if len(roots) > 1:
        raise MultipleRoots(roots)
    return roots[0] if roots else None


def unwrap_phase(phases) -> np.ndarray:
    """Remove 2 pi jumps along a sweep (plotting only)."""
    return np.unwrap(np.asarray(phases, dtype=float))
