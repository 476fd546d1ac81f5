"""Locating reflection minima and measuring the phase step across them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit, minimize_scalar

from .params import ScaledParams
from .scattering import scatter


@dataclass(frozen=True)
class Resonance:
    theta_deg: float  # refined |R1|^2 minimum
    r1sq: float
    window: tuple[float, float]  # degrees, symmetric about theta_deg
    traversal: float = math.nan  # signed phase change of R1 across the window


def r1_on_grid(p: ScaledParams, theta_deg) -> np.ndarray:
    return np.array([scatter(p.with_theta_deg(float(t))).r1 for t in theta_deg])


def _r1sq(p, t):
    return abs(scatter(p.with_theta_deg(t)).r1) ** 2


def find_minima(p: ScaledParams, theta_deg, r1=None) -> list[Resonance]:
    """Interior local minima of |R1|^2 on a grid, each polished by a bounded search."""
    th = np.asarray(theta_deg, float)
    if r1 is None:
        r1 = r1_on_grid(p, th)
    m = np.abs(r1) ** 2
    inner = np.nonzero((m[1:-1] < m[:-2]) & (m[1:-1] <= m[2:]))[0] + 1
    peaks = np.nonzero((m[1:-1] > m[:-2]) & (m[1:-1] >= m[2:]))[0] + 1
    out = []
    for i in inner:
        res = minimize_scalar(lambda t: _r1sq(p, t), bounds=(th[i - 1], th[i + 1]), method="bounded",
                              options={"xatol": 1e-10})
        t0 = float(res.x)
        # neighbouring maxima (sweep ends count as maxima)
        left = max([th[j] for j in peaks if th[j] < t0], default=th[0])
        right = min([th[j] for j in peaks if th[j] > t0], default=th[-1])
        half = 0.5 * min(t0 - left, right - t0)
        out.append(Resonance(t0, float(res.fun), (float(t0 - half), float(t0 + half))))
    return out


def _step(x, a, b, s, x0, g):
    return a + b * (x - x0) + s * np.arctan((x - x0) / g)


def phase_traversal(p: ScaledParams, res: Resonance, theta_deg, r1) -> float:
    """Signed phase change of R1 across one resonance.

    The unwrapped phase inside the window is fitted by a linear background
    plus an arctan step; the step height is ``s * pi``.
    """
    th = np.asarray(theta_deg, float)
    sel = (th >= res.window[0]) & (th <= res.window[1])
    x, ph = th[sel], np.unwrap(np.angle(np.asarray(r1)[sel]))
    i = int(np.argmin(np.abs(x - res.theta_deg)))
    slope = np.sign(ph[-1] - ph[0]) or 1.0
    popt, _ = curve_fit(_step, x, ph, p0=[ph[i], 0.0, slope, res.theta_deg, 0.05], maxfev=20000)
    return float(popt[2] * math.pi)


def resonances(p: ScaledParams, theta_min: float, theta_max: float, n: int = 2001) -> list[Resonance]:
    """Refined |R1|^2 minima in [theta_min, theta_max] with their phase traversals."""
    th = np.linspace(theta_min, theta_max, n)
    r1 = r1_on_grid(p, th)
    out = []
    for res in find_minima(p, th, r1):
        out.append(Resonance(res.theta_deg, res.r1sq, res.window, phase_traversal(p, res, th, r1)))
    return out
