"""Angle sweeps: one row of derived quantities per incidence angle."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .dressed import decay_rates, eigenvalues
from .errors import GhAtomError, InputError
from .params import ScaledParams, derive_kinematics
from .scattering import flux_residual, scatter
from .shifts import DEFAULT_REL_STEP, lateral_shifts

HEADER = (
    "theta_deg,delta_eff,Vp_re,Vp_im,Vm_re,Vm_im,ap_re,ap_im,am_re,am_im,"
    "absR1sq,absT1sq,ThetaR,ThetaT,yR,yT,dtR,dtT,flux,reason"
).split(",")

NAN = float("nan")


@dataclass(frozen=True)
class SweepSpec:
    base: ScaledParams
    theta_min: float
    theta_max: float
    n: int
    unwrap: bool = False
    rel_step: float = DEFAULT_REL_STEP

    def __post_init__(self):
        if not (0 <= self.theta_min < self.theta_max < 90):
            raise InputError("need 0 <= theta_min < theta_max < 90 (degrees)")
        if self.n < 2:
            raise InputError("a sweep needs n >= 2 samples")

    def angles(self) -> np.ndarray:
        return np.linspace(self.theta_min, self.theta_max, self.n)


@dataclass
class SweepRow:
    theta_deg: float
    delta_eff: float = NAN
    Vp_re: float = NAN
    Vp_im: float = NAN
    Vm_re: float = NAN
    Vm_im: float = NAN
    ap_re: float = NAN
    ap_im: float = NAN
    am_re: float = NAN
    am_im: float = NAN
    absR1sq: float = NAN
    absT1sq: float = NAN
    ThetaR: float = NAN
    ThetaT: float = NAN
    yR: float = NAN
    yT: float = NAN
    dtR: float = NAN
    dtT: float = NAN
    flux: float = NAN
    reason: str = ""

    def values(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


def sweep_row(base: ScaledParams, theta_deg: float, rel_step: float = DEFAULT_REL_STEP) -> SweepRow:
    """Evaluate one angle; failures leave NaNs and an explanation in ``reason``."""
    row = SweepRow(float(theta_deg))
    try:
        p = base.with_theta_deg(theta_deg)
        kin = derive_kinematics(p)
        row.delta_eff = kin.delta_eff
        vp, vm = eigenvalues(kin.delta_eff, p.gamma, p.omega)
        ap, am = decay_rates(vp, vm, kin.kx)
        row.Vp_re, row.Vp_im, row.Vm_re, row.Vm_im = vp.real, vp.imag, vm.real, vm.imag
        row.ap_re, row.ap_im, row.am_re, row.am_im = ap.real, ap.imag, am.real, am.imag
        c = scatter(p)
        row.absR1sq = abs(c.r1) ** 2
        row.absT1sq = abs(c.t1) ** 2
        row.flux = flux_residual(c, kin.k1, kin.k2, p.gamma)
        sh = lateral_shifts(p, rel_step)
        row.ThetaR, row.ThetaT = sh.theta_R, sh.theta_T
        row.yR, row.yT = sh.y_R, sh.y_T
        row.dtR, row.dtT = sh.dt_R, sh.dt_T
    except GhAtomError as exc:
        row.reason = f"{type(exc).__name__}: {exc}"
    return row


def thread_count() -> int:
    raw = os.environ.get("GH_ATOM_THREADS", "").strip()
    if not raw:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"GH_ATOM_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError("GH_ATOM_THREADS must be >= 1")
    return n


def _unwrap_segments(values):
    out = np.array(values, dtype=float)
    ok = np.isfinite(out)
    start = None
    for i in range(len(out) + 1):
        if i < len(out) and ok[i]:
            if start is None:
                start = i
        elif start is not None:
            out[start:i] = np.unwrap(out[start:i])
            start = None
    return out


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list[SweepRow]:
    """Rows in increasing angle order; computed on up to ``threads`` workers."""
    angles = [float(t) for t in spec.angles()]
    workers = threads if threads is not None else thread_count()
    if workers <= 1:
        rows = [sweep_row(spec.base, t, spec.rel_step) for t in angles]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: sweep_row(spec.base, t, spec.rel_step), angles))
    if spec.unwrap:
        for name in ("ThetaR", "ThetaT"):
            un = _unwrap_segments([getattr(r, name) for r in rows])
            rows = [replace(r, **{name: float(v)}) for r, v in zip(rows, un)]
    return rows


def format_number(x: float) -> str:
    """Shortest text that round-trips the double, in scientific notation."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    # 17 significant digits always round-trip
    return f"{x:.16e}"


def write_csv(rows, stream) -> None:
    import csv

    w = csv.writer(stream, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        vals = r.values()
        w.writerow([format_number(v) for v in vals[:-1]] + [vals[-1]])


def read_csv(stream) -> list[SweepRow]:
    import csv

    rd = csv.reader(stream)
    head = next(rd)
    if head != HEADER:
        raise InputError(f"unexpected header {head}")
    rows = []
    for rec in rd:
        if len(rec) != len(HEADER):
            raise InputError(f"row has {len(rec)} fields, expected {len(HEADER)}")
        rows.append(SweepRow(*[float(v) for v in rec[:-1]], reason=rec[-1]))
    return rows
