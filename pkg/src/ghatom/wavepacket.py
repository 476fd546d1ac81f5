"""Wavepacket synthesis: an independent check of the stationary-phase shifts.

The reflected (transmitted) ground-state packet is built by superposing the
exact stationary solutions,

    Psi_R(x, y, t) = sum_k' f(k' - k) R1(k') exp(-i kx' (x + x0) + i ky' (y - y0) - i k'^2 t)
    Psi_T(x, y, t) = sum_k' f(k' - k) T1(k') exp(+i kx' (x - x0) + i ky' (y - y0) - i k'^2 t)

with a Gaussian weight f(q) = exp(-|q|^2 / (2 sigma_k^2)) sampled on a
tensor grid of +-4 sigma_k. The sum over nodes factorises into two matrix
products, so the field on a whole spatial lattice costs O(modes * N^2).

Peaks are located on |Psi|^2 and tracked in time; the measured delay and
lateral shift follow from where the peak trajectory crosses the slab face.
Nothing here uses the phase gradients, so agreement with
:func:`ghatom.shifts.lateral_shifts` is a genuine end-to-end test.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import maximum_filter

from .errors import InputError, MultiPeak, NumericalError, PeakOnBoundary, ZeroAmplitude
from .params import ScaledParams, polar_to_cartesian
from .scattering import amplitude
from .shifts import delay_and_shift, phase_gradient

log = logging.getLogger(__name__)

SPAN_SIGMAS = 4.0
EDGE_CELLS = 3
MULTIPEAK_RATIO = 0.8


@dataclass(frozen=True)
class PacketSpec:
    """Carrier, width and sampling of a Gaussian wavepacket.

    ``center`` is (k, theta) of the carrier; None takes it from the scattering
    parameters. ``origin`` is the initial peak (x0, y0); None places the packet
    ``lead`` widths (1/sigma_k) in front of the slab on the line that hits the
    slab face at y = 0. ``times`` are observation times; None picks two
    times after the packet has cleared the slab.
    """

    sigma_k: float
    modes: int = 64
    center: tuple[float, float] | None = None
    origin: tuple[float, float] | None = None
    times: tuple[float, ...] | None = None
    grid_points: int = 256
    lead: float = 3.0

    def __post_init__(self):
        if self.sigma_k <= 0:
            raise InputError("sigma_k must be positive")
        if self.modes < 32:
            raise InputError("modes must be >= 32")
        if self.grid_points < 16:
            raise InputError("grid_points must be >= 16")

    @property
    def width(self) -> float:
        """Spatial 1/e half-width of |Psi|."""
        return math.sqrt(2.0) / self.sigma_k


@dataclass
class PacketField:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # shape (len(x), len(y))
    channel: str
    time: float

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True)
class PacketNodes:
    kx: np.ndarray
    ky: np.ndarray
    weights: np.ndarray  # f * S on the (kx, ky) tensor grid
    zero_nodes: int = 0


@dataclass(frozen=True)
class ShiftComparison:
    channel: str
    sigma_k: float
    dt_measured: float
    y_measured: float
    dt_predicted: float
    y_predicted: float
    peaks: tuple = field(default=(), repr=False)

    @property
    def y_rel_error(self) -> float:
        return abs(self.y_measured - self.y_predicted) / abs(self.y_predicted)

    @property
    def dt_rel_error(self) -> float:
        return abs(self.dt_measured - self.dt_predicted) / abs(self.dt_predicted)


def _carrier(p: ScaledParams, spec: PacketSpec) -> tuple[float, float]:
    k, theta = spec.center if spec.center is not None else (p.k, p.theta)
    return polar_to_cartesian(k, theta)


def default_origin(p: ScaledParams, spec: PacketSpec) -> tuple[float, float]:
    """Start ``lead`` widths before the slab, aimed at (x, y) = (-L/2, 0)."""
    kx, ky = _carrier(p, spec)
    t0 = spec.lead * spec.width / (2 * kx)
    return -(p.L / 2 + 2 * kx * t0), -2 * ky * t0


def node_amplitudes(p: ScaledParams, spec: PacketSpec, channel: str) -> PacketNodes:
    kx0, ky0 = _carrier(p, spec)
    q = np.linspace(-SPAN_SIGMAS * spec.sigma_k, SPAN_SIGMAS * spec.sigma_k, spec.modes)
    dq = q[1] - q[0]
    kx = kx0 + q
    ky = ky0 + q
    if kx[0] <= 0:
        raise InputError("packet momentum spread reaches k_x <= 0; reduce sigma_k or theta")
    f = np.exp(-(q[:, None] ** 2 + q[None, :] ** 2) / (2 * spec.sigma_k**2)) * dq * dq
    s = np.empty((spec.modes, spec.modes), complex)
    zeros = 0
    for i, a in enumerate(kx):
        for j, b in enumerate(ky):
            try:
                s[i, j] = amplitude(p, float(a), float(b), channel)
            except ZeroAmplitude:
                s[i, j] = 0
                zeros += 1
    if zeros:
        log.warning("%d packet nodes had zero amplitude and were dropped", zeros)
    return PacketNodes(kx, ky, f * s, zeros)


def synthesize(
    p: ScaledParams,
    spec: PacketSpec,
    channel: str,
    t: float,
    x: np.ndarray | None = None,
    y: np.ndarray | None = None,
    nodes: PacketNodes | None = None,
) -> PacketField:
    """Sample the reflected or transmitted packet at time ``t``.

    Without explicit ``x``/``y`` the lattice spans ``12 / sigma_k`` per axis,
    centred on the geometric (phase-free) peak position.
    """
    if channel not in ("R", "T"):
        raise ValueError(f"channel must be 'R' or 'T', got {channel!r}")
    if t < 0:
        raise InputError("t must be >= 0")
    if nodes is None:
        nodes = node_amplitudes(p, spec, channel)
    x0, y0 = spec.origin if spec.origin is not None else default_origin(p, spec)
    kx0, ky0 = _carrier(p, spec)
    if x is None or y is None:
        half = 6.0 / spec.sigma_k
        xc = -x0 - 2 * kx0 * t if channel == "R" else x0 + 2 * kx0 * t
        yc = y0 + 2 * ky0 * t
        x = np.linspace(xc - half, xc + half, spec.grid_points)
        y = np.linspace(yc - half, yc + half, spec.grid_points)
    kx, ky = nodes.kx, nodes.ky
    c = nodes.weights * np.exp(-1j * (kx[:, None] ** 2 + ky[None, :] ** 2) * t)
    c = c * np.exp(-1j * kx * x0)[:, None] * np.exp(-1j * ky * y0)[None, :]
    sx = -1.0 if channel == "R" else 1.0
    ex = np.exp(1j * sx * np.outer(x, kx))
    ey = np.exp(1j * np.outer(ky, y))
    values = ex @ c @ ey
    return PacketField(np.asarray(x), np.asarray(y), values, channel, t)


def _quadratic_peak(z, i, j):
    """Sub-cell maximum of a 3x3 patch of log-intensity around (i, j)."""
    patch = z[i - 1 : i + 2, j - 1 : j + 2]
    u, v = np.meshgrid([-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], indexing="ij")
    A = np.column_stack([np.ones(9), u.ravel(), v.ravel(), u.ravel() ** 2, u.ravel() * v.ravel(), v.ravel() ** 2])
    c = np.linalg.lstsq(A, patch.ravel(), rcond=None)[0]
    H = np.array([[2 * c[3], c[4]], [c[4], 2 * c[5]]])
    if np.all(np.linalg.eigvalsh(H) < 0):
        du, dv = np.linalg.solve(H, -c[1:3])
        if abs(du) <= 1 and abs(dv) <= 1:
            return du, dv
    # separable fallback
    def para(a, b, cc):
        den = a - 2 * b + cc
        return 0.0 if den >= 0 else 0.5 * (a - cc) / den
    return para(*z[i - 1 : i + 2, j]), para(*z[i, j - 1 : j + 2])


def measure_peak(field: PacketField) -> tuple[float, float]:
    inten = field.intensity
    if not np.all(np.isfinite(inten)) or inten.max() <= 0:
        raise NumericalError("packet field is empty or non-finite")
    i, j = np.unravel_index(np.argmax(inten), inten.shape)
    nx, ny = inten.shape
    if not (EDGE_CELLS <= i < nx - EDGE_CELLS and EDGE_CELLS <= j < ny - EDGE_CELLS):
        raise PeakOnBoundary(f"intensity maximum at cell ({i}, {j}) is within {EDGE_CELLS} cells of the edge")
    local = (inten == maximum_filter(inten, size=5, mode="constant")) & (inten > MULTIPEAK_RATIO * inten[i, j])
    others = [(a, b) for a, b in zip(*np.nonzero(local)) if max(abs(a - i), abs(b - j)) > 2]
    if others:
        peaks = [(field.x[i], field.y[j])] + [(field.x[a], field.y[b]) for a, b in others]
        raise MultiPeak(f"{len(peaks)} comparable intensity maxima (resonance ringing)", peaks)
    z = np.log(np.maximum(inten, inten[i, j] * 1e-300))
    du, dv = _quadratic_peak(z, i, j)
    hx = field.x[1] - field.x[0]
    hy = field.y[1] - field.y[0]
    return field.x[i] + du * hx, field.y[j] + dv * hy


def _locate(p, spec, channel, t, nodes):
    coarse = synthesize(p, spec, channel, t, nodes=nodes)
    xc, yc = measure_peak(coarse)
    half = 1.5 / spec.sigma_k
    n = spec.grid_points // 2 + 1
    fine = synthesize(
        p,
        spec,
        channel,
        t,
        x=np.linspace(xc - half, xc + half, n),
        y=np.linspace(yc - half, yc + half, n),
        nodes=nodes,
    )
    return measure_peak(fine)


def default_times(p: ScaledParams, spec: PacketSpec) -> tuple[float, float]:
    """Two times after the outgoing packet has cleared the slab by 3 widths."""
    kx, _ = _carrier(p, spec)
    x0, _ = spec.origin if spec.origin is not None else default_origin(p, spec)
    t_hit = (-p.L / 2 - x0) / (2 * kx)
    ta = t_hit + (p.L + 3 * spec.width) / (2 * kx)
    return ta, ta + 2 * spec.width / (2 * kx)


def measure_shift(p: ScaledParams, spec: PacketSpec, channel: str) -> tuple[float, float, list]:
    """Measured (dt_S, y_S) from peak positions at the observation times.

    The peak trajectory is fitted by a straight line in t; the crossing of
    the exit face (x = -L/2 for R, +L/2 for T) gives t_S, and y_S is the
    lateral offset there relative to where the incident line met x = -L/2.
    """
    kx, ky = _carrier(p, spec)
    x0, y0 = spec.origin if spec.origin is not None else default_origin(p, spec)
    times = spec.times if spec.times is not None else default_times(p, spec)
    if len(times) < 2:
        raise InputError("need at least two observation times")
    nodes = node_amplitudes(p, spec, channel)
    if not np.any(nodes.weights):
        raise ZeroAmplitude(f"{channel}1 vanishes over the whole packet")
    peaks = [_locate(p, spec, channel, t, nodes) for t in times]
    ts = np.asarray(times, float)
    xs = np.array([pk[0] for pk in peaks])
    ys = np.array([pk[1] for pk in peaks])
    bx, ax = np.polyfit(ts, xs, 1)
    by, ay = np.polyfit(ts, ys, 1)
    t0 = (-p.L / 2 - x0) / (2 * kx)
    y_hit = y0 + 2 * ky * t0
    face = -p.L / 2 if channel == "R" else p.L / 2
    t_s = (face - ax) / bx
    return t_s - t0, ay + by * t_s - y_hit, list(zip(times, peaks))


def predicted_shift(p: ScaledParams, channel: str) -> tuple[float, float]:
    """Stationary-phase (dt_S, y_S) for one channel."""
    return delay_and_shift(p, phase_gradient(p, channel))


def shift_report(p: ScaledParams, spec: PacketSpec, channels=("R", "T")) -> list[ShiftComparison]:
    """Measured vs stationary-phase delay and lateral shift per channel."""
    rows = []
    for ch in channels:
        predicted = predicted_shift(p, ch)
        dt, y, peaks = measure_shift(p, spec, ch)
        rows.append(
            ShiftComparison(
                channel=ch,
                sigma_k=spec.sigma_k,
                dt_measured=dt,
                y_measured=y,
                dt_predicted=predicted[0],
                y_predicted=predicted[1],
                peaks=tuple(peaks),
            )
        )
    return rows
