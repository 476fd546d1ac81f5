"""Dressed-state diagonalisation of the non-Hermitian 2x2 slab potential.

Inside the slab the scaled potential matrix is

    V = -1/2 [[0, Omega], [Omega, 2 (delta + i gamma/2)]]

Its eigenvectors are the columns of

    U = [[sin phi,               cos phi             ],
         [-exp(i beta) cos phi,  exp(-i beta) sin phi]]

with tan phi = Omega / (2 |V+|) and beta = arg V+.  U is not unitary once
gamma > 0, so the inverse carries the normalisation factor
f = 1 / det U.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame, SingularTransform

DEGENERACY_RTOL = 1e-13
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class DressedFrame:
    v_plus: complex
    v_minus: complex
    phi: float
    beta: float
    u: np.ndarray
    u_inv: np.ndarray
    f: complex
    alpha1: complex
    alpha2: complex

    @property
    def alphas(self) -> tuple[complex, complex]:
        return self.alpha1, self.alpha2

    @property
    def eigenvalues(self) -> tuple[complex, complex]:
        return self.v_plus, self.v_minus


def potential_matrix(delta_eff: float, gamma: float, omega: float) -> np.ndarray:
    """Scaled in-slab potential matrix, ground state first."""
    d = complex(delta_eff, 0.5 * gamma)
    return -0.5 * np.array([[0.0, omega], [omega, 2.0 * d]], dtype=complex)


def eigenvalues(delta_eff: float, gamma: float, omega: float) -> tuple[complex, complex]:
    """Return ``(V+, V-)``; labels follow the sign in front of the principal root."""
    d = complex(delta_eff, 0.5 * gamma)
    root = cmath.sqrt(d * d + omega * omega)
    return 0.5 * (-d + root), 0.5 * (-d - root)


def mixing_angles(v_plus: complex, omega: float, gamma: float, delta_eff: float = 0.0) -> tuple[float, float]:
    """Mixing angle ``phi`` in [0, pi/2) and phase ``beta = arg V+``.

    ``delta_eff`` only sets the scale of the degeneracy test.
    """
    scale = max(1.0, omega, abs(delta_eff))
    mod = abs(v_plus)
    if mod < DEGENERACY_RTOL * scale:
        raise DegenerateFrame(
            f"|V+| = {mod:.3e} vanishes; the dressed basis is undefined "
            "(use the free-propagation path for Omega = 0)"
        )
    beta = cmath.phase(v_plus)
    phi = math.atan2(omega, 2.0 * mod)
    return phi, beta


def transform_matrices(phi: float, beta: float) -> tuple[np.ndarray, np.ndarray, complex]:
    s, c = math.sin(phi), math.cos(phi)
    ep, em = cmath.exp(1j * beta), cmath.exp(-1j * beta)
    det = em * s * s + ep * c * c
    if abs(det) < SINGULAR_TOL:
        raise SingularTransform(f"det U = {det:.3e}; dressed transform is singular")
    f = 1.0 / det
    u = np.array([[s, c], [-ep * c, em * s]], dtype=complex)
    u_inv = f * np.array([[em * s, -c], [ep * c, s]], dtype=complex)
    return u, u_inv, f


def principal_sqrt(z: complex) -> complex:
    """Square root with Re >= 0, ties broken towards Im >= 0."""
    r = cmath.sqrt(z)
    if r.real == 0 and r.imag < 0:
        r = -r
    return r


def decay_rates(v_plus: complex, v_minus: complex, kx: float) -> tuple[complex, complex]:
    return principal_sqrt(v_plus - kx * kx), principal_sqrt(v_minus - kx * kx)


def dressed_frame(delta_eff: float, gamma: float, omega: float, kx: float) -> DressedFrame:
    vp, vm = eigenvalues(delta_eff, gamma, omega)
    phi, beta = mixing_angles(vp, omega, gamma, delta_eff)
    u, u_inv, f = transform_matrices(phi, beta)
    a1, a2 = decay_rates(vp, vm, kx)
    return DressedFrame(vp, vm, phi, beta, u, u_inv, f, a1, a2)
