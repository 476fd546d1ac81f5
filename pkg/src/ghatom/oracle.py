"""Seeded random-draw suites comparing the closed form with the direct solve."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GhAtomError
from .params import ScaledParams, derive_kinematics
from .scattering import coefficients_direct, flux_residual, scatter

OK_DEVIATION = 1e-9
OK_FLUX = 1e-10


def random_params(rng: np.random.Generator, gamma: float | None = None) -> ScaledParams:
    """One draw from the verification box.

    Delta in [-300, 300], Omega in [1, 50], L in [0.5, 10], theta in
    [1, 85] deg, gamma in {0, 1}; k in [1, 5] and k_L in [0, 10].
    """
    if gamma is None:
        gamma = float(rng.integers(0, 2))
    return ScaledParams(
        gamma=gamma,
        delta_L=float(rng.uniform(-300, 300)),
        omega=float(rng.uniform(1, 50)),
        k=float(rng.uniform(1, 5)),
        k_L=float(rng.uniform(0, 10)),
        L=float(rng.uniform(0.5, 10)),
        theta=math.radians(float(rng.uniform(1, 85))),
    )


def relative_deviation(a, b) -> float:
    """max over amplitude pairs of |a - b| / max(|a|, |b|)."""
    worst = 0.0
    for x, y in zip(a, b):
        scale = max(abs(x), abs(y))
        if scale > 0:
            worst = max(worst, abs(x - y) / scale)
    return worst


@dataclass
class SuiteResult:
    trials: int
    worst: float = 0.0
    worst_params: ScaledParams | None = None
    skipped: list = field(default_factory=list)

    def update(self, value, p):
        if value > self.worst or self.worst_params is None:
            self.worst = max(self.worst, value)
            self.worst_params = p


def oracle_equivalence(trials: int = 200, seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult(trials)
    for _ in range(trials):
        p = random_params(rng)
        try:
            a = scatter(p).as_tuple()
            b = coefficients_direct(p).as_tuple()
        except GhAtomError as exc:
            res.skipped.append((p, exc))
            continue
        res.update(relative_deviation(a, b), p)
    return res


def _lossless_draw(rng, open_channel):
    # rejection-sample until the excited channel is open (k2^2 > 0) or closed
    while True:
        p = random_params(rng, gamma=0.0)
        kin = derive_kinematics(p)
        e = kin.delta_eff + kin.Ex
        if abs(e) > 1e-3 and (e > 0) == open_channel:
            return p, kin


def flux_suite(trials: int = 100, seed: int = 0, open_channel: bool = True) -> SuiteResult:
    """|flux residual| at gamma = 0, excited channel open or closed."""
    rng = np.random.default_rng(seed)
    res = SuiteResult(trials)
    for _ in range(trials):
        p, kin = _lossless_draw(rng, open_channel)
        try:
            c = scatter(p)
        except GhAtomError as exc:
            res.skipped.append((p, exc))
            continue
        res.update(abs(flux_residual(c, kin.k1, kin.k2, p.gamma)), p)
    return res


def boundary_flux_excess(c, k1: float, k2: complex, L: float) -> float:
    """Outgoing flux through both faces minus incident flux (<= 0 if absorbing).

    Excited amplitudes are evaluated at the slab faces, where their current is
    Re(k2) |S2|^2 exp(-Im(k2) L).
    """
    damp = math.exp(-k2.imag * L)
    out = k1 * (abs(c.r1) ** 2 + abs(c.t1) ** 2) + k2.real * damp * (abs(c.r2) ** 2 + abs(c.t2) ** 2)
    return out - k1


def absorption_suite(trials: int = 100, seed: int = 0) -> tuple[SuiteResult, SuiteResult]:
    """gamma = 1: (min flux residual, max boundary-flux excess) over draws."""
    rng = np.random.default_rng(seed)
    resid = SuiteResult(trials, worst=math.inf)
    excess = SuiteResult(trials, worst=-math.inf)
    for _ in range(trials):
        p = random_params(rng, gamma=1.0)
        kin = derive_kinematics(p)
        try:
            c = scatter(p)
        except GhAtomError as exc:
            resid.skipped.append((p, exc))
            continue
        r = flux_residual(c, kin.k1, kin.k2, p.gamma)
        if r < resid.worst:
            resid.worst, resid.worst_params = r, p
        e = boundary_flux_excess(c, kin.k1, kin.k2, p.L)
        if e > excess.worst:
            excess.worst, excess.worst_params = e, p
    return resid, excess
