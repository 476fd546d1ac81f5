"""Command-line front end.

    ghatom coeffs          single-point amplitudes (+ --oracle comparison)
    ghatom sweep           theta sweep to CSV (+ --svg charts)
    ghatom critical-angle  angle where k_x^2 = Re V+
    ghatom oracle          seeded random-draw verification suites
    ghatom wavepacket      packet-tracked vs stationary-phase shifts

Exit codes: 0 ok, 2 bad input, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from pathlib import Path

from . import oracle as orc
from .dressed import dressed_frame
from .errors import GhAtomError, InputError, MultipleRoots, NumericalError
from .params import ScaledParams, derive_kinematics
from .scattering import coefficients_direct, flux_residual, scatter
from .shifts import DEFAULT_REL_STEP, critical_angle
from .sweep import SweepSpec, format_number, run_sweep, write_csv

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

# config key -> (argparse dest, type)
CONFIG_KEYS = {
    "gamma": ("gamma", float),
    "Delta": ("Delta", float),
    "Omega": ("Omega", float),
    "k": ("k", float),
    "kL": ("kL", float),
    "L": ("L", float),
    "theta_deg": ("theta_deg", float),
    "fd_rel_step": ("fd_rel_step", float),
    "sigma_k": ("sigma_k", float),
    "modes": ("modes", int),
}

DEFAULTS = {
    "gamma": 1.0,
    "Delta": -100.0,
    "Omega": 20.0,
    "k": 3.0,
    "kL": 8.1125,
    "L": 6.0,
    "theta_deg": 30.0,
    "fd_rel_step": DEFAULT_REL_STEP,
    "sigma_k": None,
    "modes": 64,
}

NO_CRITICAL = "Re V+ exceeds k_x^2 at every angle, so the barrier is never crossed (red detuning)"


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        dest, typ = CONFIG_KEYS[key]
        try:
            out[dest] = typ(val)
        except ValueError:
            raise InputError(f"{path}:{lineno}: bad value {val!r} for {key}") from None
    return out


def _settings(args) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config(args.config))
    for key in CONFIG_KEYS:
        val = getattr(args, CONFIG_KEYS[key][0], None)
        if val is not None:
            merged[CONFIG_KEYS[key][0]] = val
    return merged


def _params(s: dict, theta_deg: float | None = None) -> ScaledParams:
    th = s["theta_deg"] if theta_deg is None else theta_deg
    if not (0 <= th < 90):
        raise InputError(f"theta_deg must be in [0, 90), got {th}")
    return ScaledParams(
        gamma=s["gamma"],
        delta_L=s["Delta"],
        omega=s["Omega"],
        k=s["k"],
        k_L=s["kL"],
        L=s["L"],
        theta=math.radians(th),
    )


def _emit(out, key, value):
    if isinstance(value, complex):
        out.write(f"{key}_re = {format_number(value.real)}\n")
        out.write(f"{key}_im = {format_number(value.imag)}\n")
    elif isinstance(value, float):
        out.write(f"{key} = {format_number(value)}\n")
    else:
        out.write(f"{key} = {value}\n")


def cmd_coeffs(args, out) -> int:
    s = _settings(args)
    p = _params(s)
    kin = derive_kinematics(p)
    for key in ("kx", "ky", "delta_eff", "k1", "k2", "Ex"):
        _emit(out, key, getattr(kin, key))
    if p.omega == 0:
        _emit(out, "frame", "free (Omega = 0)")
    else:
        fr = dressed_frame(kin.delta_eff, p.gamma, p.omega, kin.kx)
        for key, val in (("Vp", fr.v_plus), ("Vm", fr.v_minus), ("phi", fr.phi), ("beta", fr.beta),
                         ("f", complex(fr.f)), ("alpha_p", fr.alpha1), ("alpha_m", fr.alpha2)):
            _emit(out, key, val)
    c = scatter(p)
    for key, val in zip(("R1", "R2", "T1", "T2"), c.as_tuple()):
        _emit(out, key, complex(val))
    _emit(out, "flux", flux_residual(c, kin.k1, kin.k2, p.gamma))
    if args.oracle:
        d = coefficients_direct(p, kin)
        for key, val in zip(("R1_direct", "R2_direct", "T1_direct", "T2_direct"), d.as_tuple()):
            _emit(out, key, complex(val))
        _emit(out, "oracle_rel_dev", orc.relative_deviation(c.as_tuple(), d.as_tuple()))
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    s = _settings(args)
    base = _params(s, theta_deg=0.0)
    spec = SweepSpec(base, args.theta_min, args.theta_max, args.n, unwrap=args.unwrap, rel_step=s["fd_rel_step"])
    rows = run_sweep(spec)
    if args.output in (None, "-"):
        write_csv(rows, out)
    else:
        with open(args.output, "w", newline="") as fh:
            write_csv(rows, fh)
    if args.svg:
        from .plotting import write_sweep_svgs

        stem = args.svg if args.svg is not True else str(Path(args.output or "sweep").with_suffix(""))
        for path in write_sweep_svgs(rows, stem):
            print(f"wrote {path}", file=sys.stderr)
    bad = sum(1 for r in rows if r.reason)
    if bad:
        print(f"{bad} of {len(rows)} rows carry a failure reason", file=sys.stderr)
    return EXIT_OK


def cmd_critical_angle(args, out) -> int:
    s = _settings(args)
    p = _params(s)
    t0 = time.perf_counter()
    try:
        th = critical_angle(p)
    except MultipleRoots as exc:
        _emit(out, "theta_c_deg", "ambiguous")
        _emit(out, "roots_deg", " ".join(format_number(math.degrees(r)) for r in exc.roots))
        raise
    if th is None:
        _emit(out, "theta_c_deg", "none")
        _emit(out, "reason", NO_CRITICAL)
    else:
        _emit(out, "theta_c_deg", math.degrees(th))
    print(f"elapsed {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    ok = True
    eq = orc.oracle_equivalence(args.trials, args.seed)
    good = eq.worst <= orc.OK_DEVIATION and not eq.skipped
    ok &= good
    out.write(f"equivalence trials={eq.trials} seed={args.seed} max_rel_dev={format_number(eq.worst)} "
              f"skipped={len(eq.skipped)} tol={orc.OK_DEVIATION:g} {'PASS' if good else 'FAIL'}\n")
    n_flux = max(1, args.trials // 2)
    for label, open_channel in (("flux_open", True), ("flux_closed", False)):
        r = orc.flux_suite(n_flux, args.seed, open_channel)
        good = r.worst <= orc.OK_FLUX and not r.skipped
        ok &= good
        out.write(f"{label} trials={n_flux} max_abs_residual={format_number(r.worst)} "
                  f"skipped={len(r.skipped)} tol={orc.OK_FLUX:g} {'PASS' if good else 'FAIL'}\n")
    resid, excess = orc.absorption_suite(n_flux, args.seed)
    good = resid.worst >= -orc.OK_FLUX and excess.worst <= orc.OK_FLUX and not resid.skipped
    ok &= good
    out.write(f"absorption trials={n_flux} min_residual={format_number(resid.worst)} "
              f"max_face_excess={format_number(excess.worst)} {'PASS' if good else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_wavepacket(args, out) -> int:
    from .wavepacket import PacketSpec, default_times, shift_report, synthesize

    s = _settings(args)
    p = _params(s)
    sigma = s["sigma_k"] if s["sigma_k"] is not None else 0.005 * p.k
    spec = PacketSpec(sigma_k=sigma, modes=s["modes"], grid_points=args.grid)
    channels = ("R", "T") if args.channel == "both" else (args.channel,)
    rows = shift_report(p, spec, channels)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["channel", "sigma_k", "dt_measured", "dt_predicted", "y_measured", "y_predicted", "y_rel_error"])
    for r in rows:
        w.writerow([r.channel] + [format_number(v) for v in
                   (r.sigma_k, r.dt_measured, r.dt_predicted, r.y_measured, r.y_predicted, r.y_rel_error)])
    if args.dump_field:
        t = default_times(p, spec)[0]
        field = synthesize(p, spec, channels[0], t)
        with open(args.dump_field, "w", newline="") as fh:
            write_field(field, fh)
    return EXIT_OK


def write_field(field, stream) -> None:
    """Grid CSV: one ``x,y,re,im`` row per lattice point, x outer, y inner."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["x", "y", "re", "im"])
    for i, x in enumerate(field.x):
        for j, y in enumerate(field.y):
            v = field.values[i, j]
            w.writerow([format_number(float(x)), format_number(float(y)),
                        format_number(float(v.real)), format_number(float(v.imag))])


def _add_params(ap):
    g = ap.add_argument_group("parameters (scaled units; override --config)")
    g.add_argument("--config", help="file of 'key = value' lines")
    g.add_argument("--gamma", type=float)
    g.add_argument("--Delta", type=float, help="laser detuning")
    g.add_argument("--Omega", type=float, help="Rabi frequency")
    g.add_argument("--k", type=float, help="incident wavenumber")
    g.add_argument("--kL", type=float, help="laser wavenumber (along y)")
    g.add_argument("--L", type=float, help="slab thickness")
    g.add_argument("--theta-deg", dest="theta_deg", type=float, help="incidence angle in degrees")
    g.add_argument("--fd-rel-step", dest="fd_rel_step", type=float, help="finite-difference step / k")
    g.add_argument("--sigma-k", dest="sigma_k", type=float)
    g.add_argument("--modes", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ghatom", description="Two-level atom scattering off a light slab")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="amplitudes at one angle")
    _add_params(c)
    c.add_argument("--oracle", action="store_true", help="append the direct boundary-matching solve")
    c.set_defaults(func=cmd_coeffs)

    sw = sub.add_parser("sweep", help="theta sweep to CSV")
    _add_params(sw)
    sw.add_argument("--theta-min", type=float, default=0.5)
    sw.add_argument("--theta-max", type=float, default=89.5)
    sw.add_argument("--n", type=int, default=357)
    sw.add_argument("--unwrap", action="store_true", help="unwrap the phase columns")
    sw.add_argument("-o", "--output", help="CSV path (default stdout)")
    sw.add_argument("--svg", nargs="?", const=True, metavar="STEM",
                    help="also write STEM_R.svg, STEM_T.svg, STEM_dressed.svg")
    sw.set_defaults(func=cmd_sweep)

    ca = sub.add_parser("critical-angle", help="angle where the barrier top is reached")
    _add_params(ca)
    ca.set_defaults(func=cmd_critical_angle)

    o = sub.add_parser("oracle", help="random-draw verification suites")
    o.add_argument("--trials", type=int, default=200)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_oracle)

    w = sub.add_parser("wavepacket", help="packet-tracked shifts vs stationary phase")
    _add_params(w)
    w.add_argument("--channel", choices=("R", "T", "both"), default="R")
    w.add_argument("--grid", type=int, default=256, help="lattice points per axis")
    w.add_argument("--dump-field", help="write the first observed field as grid CSV")
    w.set_defaults(func=cmd_wavepacket)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args, sys.stdout)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GhAtomError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
