"""Scaled parameter model and incidence kinematics.

Units: wavenumbers in k_gamma = sqrt(2 m gamma / hbar), lengths in 1/k_gamma,
times in 1/gamma, energies in hbar*gamma. In these units the kinetic energy of
a plane wave is simply k**2 and the effective detuning reads

    delta = Delta - 2 k_y k_L - k_L**2

(see ``docs/scaled_units.md`` for the reduction).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

from .errors import InputError


@dataclass(frozen=True)
class ScaledParams:
    """Dimensionless description of one incidence configuration.

    Attributes
    ----------
    gamma : float
        Excited-state decay rate (1 under the usual convention; 0 is allowed
        so the lossless limit can be studied).
    delta_L : float
        Laser detuning Delta / gamma.
    omega : float
        Peak Rabi frequency Omega / gamma.
    k : float
        Magnitude of the incident wavevector.
    k_L : float
        Laser wavenumber.
    L : float
        Slab width.
    theta : float
        Incidence angle from the slab normal, radians.
    """

    gamma: float = 1.0
    delta_L: float = -100.0
    omega: float = 20.0
    k: float = 3.0
    k_L: float = 8.1125
    L: float = 6.0
    theta: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "delta_L", "omega", "k", "k_L", "L", "theta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InputError(f"{name} must be finite, got {value!r}")
        if self.gamma < 0:
            raise InputError(f"gamma must be >= 0, got {self.gamma}")
        if self.k <= 0:
            raise InputError(f"k must be > 0, got {self.k}")
        if self.L < 0:
            raise InputError(f"L must be >= 0, got {self.L}")
        if not 0 <= self.theta < math.pi / 2:
            raise InputError(f"theta must lie in [0, pi/2), got {self.theta}")
        if self.omega < 0:
            raise InputError(f"omega must be >= 0, got {self.omega}")
        if self.k_L < 0:
            raise InputError(f"k_L must be >= 0, got {self.k_L}")

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    def with_theta_deg(self, theta_deg: float) -> "ScaledParams":
        return replace(self, theta=math.radians(theta_deg))

    def with_wavevector(self, kx: float, ky: float) -> "ScaledParams":
        """Copy with the incident wavevector set from Cartesian components."""
        k, theta = cartesian_to_polar(kx, ky)
        return replace(self, k=k, theta=theta)


@dataclass(frozen=True)
class Kinematics:
    kx: float
    ky: float
    delta_eff: float
    k1: float
    k2: complex
    Ex: float


def polar_to_cartesian(k: float, theta: float) -> tuple[float, float]:
    return k * math.cos(theta), k * math.sin(theta)


def cartesian_to_polar(kx: float, ky: float) -> tuple[float, float]:
    return math.hypot(kx, ky), math.atan2(ky, kx)


def effective_detuning(delta_L: float, ky: float, k_L: float) -> float:
    """Detuning corrected by the Doppler (2 k_y k_L) and recoil (k_L**2) shifts."""
    return delta_L - 2.0 * ky * k_L - k_L * k_L


def excited_wavevector(delta_eff: float, gamma: float, kx: float) -> complex:
    """Free excited-state wavevector, on the branch Im >= 0 (Re >= 0 on ties)."""
    k2 = cmath.sqrt(complex(delta_eff + kx * kx, 0.5 * gamma))
    if k2.imag < 0 or (k2.imag == 0 and k2.real < 0):
        k2 = -k2
    return k2


def kinematics_from_components(p: ScaledParams, kx: float, ky: float) -> Kinematics:
    """Kinematics for an arbitrary Cartesian wavevector under ``p``'s laser settings.

    Used by the differentiation and wavepacket code, which perturb k_x and k_y
    independently.
    """
    delta = effective_detuning(p.delta_L, ky, p.k_L)
    return Kinematics(
        kx=kx,
        ky=ky,
        delta_eff=delta,
        k1=kx,
        k2=excited_wavevector(delta, p.gamma, kx),
        Ex=kx * kx,
    )


def derive_kinematics(p: ScaledParams) -> Kinematics:
    kx, ky = polar_to_cartesian(p.k, p.theta)
    return kinematics_from_components(p, kx, ky)
