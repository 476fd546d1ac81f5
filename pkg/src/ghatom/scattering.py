"""Reflection and transmission amplitudes of the dressed slab.

Two independent routes are provided:

* :func:`m_matrices` + :func:`coefficients` -- closed form built from the
  dressed frame. Each block is

      M(+-)_ij = sum_n U_in Uinv_nj [(1 +- k_j/k_i) cosh(a_n L)
                                     - i (k_i k_j -+ a_n^2)/(k_i a_n) sinh(a_n L)]

  and T1 = 2 M+_22 / det M+ exp(-i k1 L), etc.
* :func:`coefficients_direct` -- plain boundary matching: eight continuity
  conditions for eight unknown amplitudes, solved with a pivoted LU.

Numerics of the closed form
---------------------------
When a dressed channel is evanescent (Re a_n L >> 1) the ``exp(+a_n L)`` part
of its contribution to M is a rank-one matrix, so its square cancels out of
every 2x2 determinant. Computing ``M11 M22 - M12 M21`` from the assembled
entries then loses ``Re(a_n L) / ln 10`` digits. The blocks are therefore
kept as a sum of exponential pieces ``sum_k exp(z_k) A_k`` and the
determinants are expanded pairwise, dropping the exactly vanishing
same-piece products of rank-one pieces. All exponentials are shifted by the
largest total exponent so nothing overflows.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .dressed import DressedFrame, dressed_frame, potential_matrix, principal_sqrt
from .errors import ChannelDegenerate, IllConditioned, ResonanceSingular
from .params import Kinematics, ScaledParams, derive_kinematics, kinematics_from_components

CHANNEL_TOL = 1e-13
GRAZING_LIMIT = math.radians(89.9)
RESONANCE_TOL = 1e-12
COND_LIMIT = 1e12
SERIES_CUTOFF = 1e-4
# channels with |Re(a L)| above this are split into exp(+aL), exp(-aL) pieces
SPLIT_THRESHOLD = 1.0


@dataclass(frozen=True)
class _Piece:
    exponent: complex
    plus: np.ndarray
    minus: np.ndarray
    rank_one: bool


@dataclass(frozen=True)
class TransferBlocks:
    m_plus: np.ndarray
    m_minus: np.ndarray
    pieces: tuple = field(default=(), repr=False, compare=False)
    scale: float = field(default=0.0, repr=False, compare=False)


@dataclass(frozen=True)
class ScatterCoeffs:
    r1: complex
    r2: complex
    t1: complex
    t2: complex
    blocks: TransferBlocks | None = field(default=None, repr=False, compare=False)

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return self.r1, self.r2, self.t1, self.t2


FREE = ScatterCoeffs(0j, 0j, 1 + 0j, 0j)


def sinhc(alpha: complex, L: float) -> complex:
    """sinh(alpha L) / alpha, continuous through alpha = 0."""
    z = alpha * L
    if abs(z) < SERIES_CUTOFF:
        z2 = z * z
        return L * (1 + z2 / 6 + z2 * z2 / 120)
    return cmath.sinh(z) / alpha


def _bracket(ki, kj, alpha, c, s, sign):
    # s = sinh(aL)/a
    return (1 + sign * kj / ki) * c - 1j * kj * s + sign * 1j * alpha * alpha * s / ki


def _check_channels(k):
    for kk in k:
        if abs(kk) < CHANNEL_TOL:
            raise ChannelDegenerate(
                f"free wavevector {kk} vanishes (grazing incidence or excited-channel threshold); "
                "keep theta below 90 deg - epsilon"
            )


def m_matrices(frame: DressedFrame, k1: float, k2: complex, L: float) -> TransferBlocks:
    k = (complex(k1), complex(k2))
    _check_channels(k)
    u, ui = frame.u, frame.u_inv
    m_plus = np.zeros((2, 2), complex)
    m_minus = np.zeros((2, 2), complex)
    pieces = []
    scale = 0.0
    for n, alpha in enumerate(frame.alphas):
        z = alpha * L
        outer = np.outer(u[:, n], ui[n, :])
        split = abs(z.real) > SPLIT_THRESHOLD
        with np.errstate(over="ignore", invalid="ignore"):
            c = cmath.cosh(z) if abs(z.real) < 700 else complex(math.inf)
            s = sinhc(alpha, L) if abs(z.real) < 700 else complex(math.inf)
        gp = np.empty((2, 2), complex)
        gm = np.empty((2, 2), complex)
        for i in range(2):
            for j in range(2):
                gp[i, j] = outer[i, j] * _bracket(k[i], k[j], alpha, c, s, +1)
                gm[i, j] = outer[i, j] * _bracket(k[i], k[j], alpha, c, s, -1)
        m_plus += gp
        m_minus += gm
        if not split:
            pieces.append(_Piece(0j, gp, gm, False))
            continue
        scale += abs(z.real)
        # exp(+z) and exp(-z) parts; each is u_col (x) row, hence rank one
        for sgn in (+1, -1):
            a = sgn * alpha
            pp = np.empty((2, 2), complex)
            pm = np.empty((2, 2), complex)
            for i in range(2):
                for j in range(2):
                    col = outer[i, j] * (a - 1j * k[j]) / (2 * k[i] * a)
                    pp[i, j] = col * (k[i] + 1j * a)
                    pm[i, j] = col * (k[i] - 1j * a)
            pieces.append(_Piece(sgn * z, pp, pm, True))
    return TransferBlocks(m_plus, m_minus, tuple(pieces), scale)


def _mixed(x, y, r0, r1):
    """x[r0,0] y[r1,1] - x[r0,1] y[r1,0]: bilinear part of a 2x2 minor."""
    return x[r0, 0] * y[r1, 1] - x[r0, 1] * y[r1, 0]


def _expand(pieces, scale, first, second, r0, r1):
    """Scaled sum_{k,l} exp(z_k + z_l - scale) * minor(first_k, second_l).

    Returns the sum and the sum of magnitudes (for cancellation checks).
    """
    total = 0j
    mag = 0.0
    for a, pa in enumerate(pieces):
        for b, pb in enumerate(pieces):
            if a == b and pa.rank_one:
                continue
            w = cmath.exp(pa.exponent + pb.exponent - scale)
            term = w * _mixed(first(pa), second(pb), r0, r1)
            total += term
            mag += abs(term)
    return total, mag


def coefficients(blocks: TransferBlocks, k1: float, k2: complex, L: float) -> ScatterCoeffs:
    pieces = blocks.pieces
    if not pieces:
        pieces = (_Piece(0j, blocks.m_plus, blocks.m_minus, False),)
    S = blocks.scale
    plus = lambda p: p.plus  # noqa: E731
    minus = lambda p: p.minus  # noqa: E731
    # det(sum_k c_k A_k) = sum_{k,l} c_k c_l minor(A_k, A_l)
    det, det_mag = _expand(pieces, S, plus, plus, 0, 1)
    if det_mag == 0 or abs(det) < RESONANCE_TOL * det_mag:
        raise ResonanceSingular(f"det M+ = {det:.3e} collapses (relative {abs(det) / max(det_mag, 1e-300):.2e})")
    nr1, _ = _expand(pieces, S, minus, plus, 0, 1)
    nr2, _ = _expand(pieces, S, minus, plus, 1, 1)

    ph1 = -1j * k1 * L
    ph12 = -0.5j * (k1 + k2) * L
    t1 = 0j
    t2 = 0j
    for p in pieces:
        t1 += 2 * p.plus[1, 1] * cmath.exp(p.exponent - S + ph1)
        t2 -= 2 * p.plus[1, 0] * cmath.exp(p.exponent - S + ph12)
    t1 /= det
    t2 /= det
    r1 = nr1 / det * cmath.exp(ph1)
    r2 = nr2 / det * cmath.exp(ph12)
    return ScatterCoeffs(r1, r2, t1, t2, blocks)


def coefficients_direct(p: ScaledParams, kin: Kinematics | None = None) -> ScatterCoeffs:
    """Brute-force boundary matching, independent of the dressed-frame algebra.

    The slab modes come from a numerical eigendecomposition of the potential
    matrix; the eight continuity conditions (both components and their
    x-derivatives at x = -L/2 and x = +L/2) are solved as one dense system.
    """
    if kin is None:
        kin = derive_kinematics(p)
    if p.omega == 0:
        return FREE
    k1 = kin.kx
    k2 = principal_sqrt(kin.kx**2 + complex(kin.delta_eff, 0.5 * p.gamma))
    if k2.imag < 0:
        k2 = -k2
    _check_channels((k1, k2))
    L = p.L
    lam, vec = np.linalg.eig(potential_matrix(kin.delta_eff, p.gamma, p.omega))
    kappa = [principal_sqrt(complex(v) - k1 * k1) for v in lam]
    decay = [cmath.exp(-kap * L) for kap in kappa]

    # unknowns: R1', R2', T1', T2', A1, A2, B1, B2 (primes: values at the faces)
    # slab mode n: A_n exp(kap (x - L/2)) + B_n exp(-kap (x + L/2))
    M = np.zeros((8, 8), complex)
    rhs = np.zeros(8, complex)
    inc = cmath.exp(-0.5j * k1 * L)
    for c in range(2):
        for n in range(2):
            e, kap, d = vec[c, n], kappa[n], decay[n]
            # x = -L/2
            M[2 * c, 4 + n] = e * d
            M[2 * c, 6 + n] = e
            M[2 * c + 1, 4 + n] = e * kap * d
            M[2 * c + 1, 6 + n] = -e * kap
            # x = +L/2
            M[4 + 2 * c, 4 + n] = e
            M[4 + 2 * c, 6 + n] = e * d
            M[5 + 2 * c, 4 + n] = e * kap
            M[5 + 2 * c, 6 + n] = -e * kap * d
    kc = (k1, k2)
    for c in range(2):
        M[2 * c, c] = -1.0
        M[2 * c + 1, c] = 1j * kc[c]
        M[4 + 2 * c, 2 + c] = -1.0
        M[5 + 2 * c, 2 + c] = -1j * kc[c]
    rhs[0] = inc
    rhs[1] = 1j * k1 * inc

    row = np.abs(M).max(axis=1, keepdims=True)
    Ms = M / row
    col = np.abs(Ms).max(axis=0, keepdims=True)
    Ms = Ms / col
    cond = np.linalg.cond(Ms)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditioned(f"boundary-matching system has condition {cond:.3e}", cond)
    y = np.linalg.solve(Ms, rhs / row[:, 0]) / col[0]
    r1p, r2p, t1p, t2p = y[:4]
    back1 = cmath.exp(-0.5j * k1 * L)
    back2 = cmath.exp(-0.5j * k2 * L)
    return ScatterCoeffs(r1p * back1, r2p * back2, t1p * back1, t2p * back2)


def flux_residual(c: ScatterCoeffs, k1: float, k2: complex, gamma: float, rtol: float = 1e-12) -> float:
    """Ground-channel flux deficit minus excited-channel outgoing flux.

    Zero for a lossless slab; positive when the slab absorbs. Excited
    amplitudes only count when ``k2`` is real (an open, undamped channel).
    """
    w = k2.real if abs(k2.imag) <= rtol * abs(k2) else 0.0
    return k1 * (1 - abs(c.r1) ** 2 - abs(c.t1) ** 2) - w * (abs(c.r2) ** 2 + abs(c.t2) ** 2)


def scatter_kinematics(p: ScaledParams, kin: Kinematics) -> ScatterCoeffs:
    """Closed-form amplitudes for explicit kinematics under ``p``'s slab."""
    if p.omega == 0:
        return FREE
    frame = dressed_frame(kin.delta_eff, p.gamma, p.omega, kin.kx)
    blocks = m_matrices(frame, kin.k1, kin.k2, p.L)
    return coefficients(blocks, kin.k1, kin.k2, p.L)


def scatter(p: ScaledParams) -> ScatterCoeffs:
    if p.theta >= GRAZING_LIMIT:
        raise ChannelDegenerate(f"theta = {p.theta_deg:.4f} deg is too close to grazing (limit 89.9 deg)")
    return scatter_kinematics(p, derive_kinematics(p))


def amplitude(p: ScaledParams, kx: float, ky: float, channel: str) -> complex:
    """Ground-state amplitude R1 or T1 at Cartesian wavevector (kx, ky)."""
    c = scatter_kinematics(p, kinematics_from_components(p, kx, ky))
    if channel == "R":
        return c.r1
    if channel == "T":
        return c.t1
    raise ValueError(f"channel must be 'R' or 'T', got {channel!r}")
