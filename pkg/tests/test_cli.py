import io
import math
import xml.etree.ElementTree as ET

import pytest

from ghatom import cli
from ghatom.params import ScaledParams
from ghatom.scattering import scatter
from ghatom.sweep import HEADER, format_number, read_csv


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse_report(text):
    return dict(line.split(" = ", 1) for line in text.splitlines())


def test_coeffs_matches_library(capsys):
    code, out, _ = run(["coeffs", "--theta-deg", "30"], capsys)
    assert code == 0
    rep = parse_report(out)
    c = scatter(ScaledParams(theta=math.radians(30)))
    assert rep["T1_re"] == format_number(c.t1.real)
    assert rep["R1_im"] == format_number(c.r1.imag)
    assert "flux" in rep and "Vp_re" in rep


def test_coeffs_zero_width(capsys):
    code, out, _ = run(["coeffs", "--L", "0"], capsys)
    rep = parse_report(out)
    assert code == 0
    assert float(rep["T1_re"]) == 1.0
    assert abs(float(rep["T1_im"])) < 1e-12


def test_coeffs_oracle_columns(capsys):
    code, out, _ = run(["coeffs", "--oracle", "--Delta", "200"], capsys)
    rep = parse_report(out)
    assert code == 0
    assert float(rep["oracle_rel_dev"]) < 1e-9
    assert "T2_direct_im" in rep


def test_exit_codes(capsys, tmp_path):
    assert run(["coeffs", "--k", "-1"], capsys)[0] == 2
    assert run(["coeffs", "--theta-deg", "89.95"], capsys)[0] == 3
    assert run(["coeffs", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 4
    assert run(["sweep", "--theta-min", "50", "--theta-max", "40"], capsys)[0] == 2
    assert run(["sweep", "--n", "3", "-o", str(tmp_path / "no" / "dir.csv")], capsys)[0] == 4
    with pytest.raises(SystemExit) as exc:
        cli.main(["coeffs", "--Delta", "abc"])
    assert exc.value.code == 2


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# blue configuration\nDelta = 200\ntheta_deg = 10  # degrees\nmodes = 48\n")
    _, a, _ = run(["coeffs", "--config", str(cfg)], capsys)
    _, b, _ = run(["coeffs", "--Delta", "200", "--theta-deg", "10"], capsys)
    _, c, _ = run(["coeffs", "--config", str(cfg), "--theta-deg", "20"], capsys)
    assert a == b
    assert a != c
    bad = tmp_path / "bad.cfg"
    bad.write_text("Detuning = 3\n")
    assert run(["coeffs", "--config", str(bad)], capsys)[0] == 2


def sweep_bytes(path, capsys, *extra):
    code, _, _ = run(["sweep", "--Delta", "-100", "--theta-min", "25", "--theta-max", "40",
                      "--n", "41", "-o", str(path), *extra], capsys)
    assert code == 0
    return path.read_bytes()


def test_sweep_deterministic_across_threads(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GH_ATOM_THREADS", "1")
    a = sweep_bytes(tmp_path / "a.csv", capsys)
    monkeypatch.setenv("GH_ATOM_THREADS", "3")
    b = sweep_bytes(tmp_path / "b.csv", capsys)
    assert a == b


def test_bad_thread_count(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GH_ATOM_THREADS", "zero")
    assert run(["sweep", "--n", "2", "-o", str(tmp_path / "x.csv")], capsys)[0] == 2


def test_sweep_round_trip(tmp_path, capsys):
    path = tmp_path / "s.csv"
    sweep_bytes(path, capsys, "--unwrap")
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(HEADER)
    rows = read_csv(io.StringIO(text))
    assert len(rows) == 41
    assert all(r.reason == "" for r in rows)
    for a, b in zip(rows, rows[1:]):
        assert abs(b.ThetaR - a.ThetaR) < math.pi
        assert abs(b.ThetaT - a.ThetaT) < math.pi
    # values survive the text round trip exactly
    again = io.StringIO()
    from ghatom.sweep import write_csv

    write_csv(rows, again)
    assert again.getvalue() == text


def test_two_point_sweep(capsys):
    code, out, _ = run(["sweep", "--n", "2", "--theta-min", "0", "--theta-max", "10"], capsys)
    assert code == 0
    rows = read_csv(io.StringIO(out))
    assert [r.theta_deg for r in rows] == [0.0, 10.0]


def test_failed_rows_carry_reason(capsys):
    code, out, _ = run(["sweep", "--Omega", "0", "--n", "3", "--theta-min", "10", "--theta-max", "30"], capsys)
    assert code == 0
    rows = read_csv(io.StringIO(out))
    # free slab: R1 = 0 so its phase is undefined
    assert all(r.reason.startswith("ZeroAmplitude") for r in rows)
    assert all(r.absT1sq == 1.0 for r in rows)
    assert all(math.isnan(r.yR) for r in rows)


def test_svg_output(tmp_path, capsys):
    stems = []
    for name in ("one", "two"):
        sweep_bytes(tmp_path / f"{name}.csv", capsys, "--svg", str(tmp_path / name))
        stems.append(tmp_path / name)
    for kind in ("R", "T", "dressed"):
        a = (tmp_path / f"one_{kind}.svg").read_bytes()
        b = (tmp_path / f"two_{kind}.svg").read_bytes()
        assert a == b
        root = ET.fromstring(a)
        assert root.tag.endswith("svg") and root.get("version") == "1.1"


def test_critical_angle_command(capsys):
    code, out, _ = run(["critical-angle", "--Delta", "200"], capsys)
    assert code == 0
    assert float(parse_report(out)["theta_c_deg"]) == pytest.approx(69.4, abs=0.3)
    code, out, _ = run(["critical-angle", "--Delta", "-100"], capsys)
    rep = parse_report(out)
    assert code == 0 and rep["theta_c_deg"] == "none" and "red" in rep["reason"]


def test_oracle_command_reproducible(capsys):
    code, a, _ = run(["oracle", "--trials", "1", "--seed", "7"], capsys)
    _, b, _ = run(["oracle", "--trials", "1", "--seed", "7"], capsys)
    assert code == 0 and a == b
    assert a.count("PASS") == 4


def test_wavepacket_command(tmp_path, capsys):
    dump = tmp_path / "field.csv"
    code, out, _ = run(["wavepacket", "--Omega", "0", "--theta-deg", "45", "--sigma-k", "0.05",
                        "--channel", "T", "--grid", "64", "--dump-field", str(dump)], capsys)
    assert code == 0
    head, row = out.splitlines()
    assert head.startswith("channel,sigma_k")
    assert float(row.split(",")[4]) == pytest.approx(6.0, rel=0.02)
    lines = dump.read_text().splitlines()
    assert lines[0] == "x,y,re,im"
    assert len(lines) == 1 + 64 * 64
