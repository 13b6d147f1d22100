"""Command-line driver: exit codes, stdout shapes, JSON side files.

Everything runs in-process through ``main(argv)`` so coverage tools see it
and failures give real tracebacks instead of a subprocess returncode.
"""

import json

import pytest

from affopers.cli import main
from affopers.contour import Contour, pochhammer
from affopers.integrate import twisted_integral
from affopers.miura import MiuraData, build_miura
from affopers.oper_core import quasi_canonicalize

# Two regular points with opposite first coordinates and unit levels; the
# single color-1 Bethe equation then has the closed-form root w = 3/2.
A1_POINTS = [
    {"z": "0", "weight": {"lambda_dot": ["1/2"], "level": "1", "delta": "0"}},
    {"z": "1", "weight": {"lambda_dot": ["-1/2"], "level": "1", "delta": "0"}},
]


def write_model(path, roots, points=A1_POINTS):
    blob = {
        "algebra": {"type": "A", "rank": 1, "cutoff": 5},
        "points": points,
        "bethe_roots": roots,
    }
    path.write_text(json.dumps(blob))
    return blob


# --------------------------------------------------------------- bethe-check


def test_on_shell_model_exits_zero(tmp_path, capsys):
    path = tmp_path / "model.json"
    write_model(path, [{"w": "3/2", "color": 1}])
    assert main(["bethe-check", str(path)]) == 0
    out = capsys.readouterr().out
    assert "ON SHELL" in out
    assert "regular" in out


def test_off_shell_model_exits_one(tmp_path, capsys):
    path = tmp_path / "model.json"
    write_model(path, [{"w": "17/10", "color": 1}])
    assert main(["bethe-check", str(path)]) == 1
    out = capsys.readouterr().out
    assert "OFF SHELL" in out
    assert "obstructed" in out
    assert "-20/119" in out  # the exact master-function partial


def test_no_roots_is_trivially_on_shell(tmp_path, capsys):
    path = tmp_path / "model.json"
    write_model(path, [])
    assert main(["bethe-check", str(path)]) == 0
    assert "trivially on shell" in capsys.readouterr().out


def test_bethe_check_json_report(tmp_path):
    path = tmp_path / "model.json"
    write_model(path, [{"w": "17/10", "color": 1}])
    report = tmp_path / "report.json"
    assert main(["bethe-check", str(path), "--json", str(report)]) == 1
    rep = json.loads(report.read_text())
    assert rep["on_shell"] is False
    (row,) = rep["roots"]
    assert row["w"] == "17/10"
    assert row["color"] == 1
    assert row["residual"] == "-20/119"
    assert row["regular"] is False
    assert row["max_pole_order"] >= 2


def test_model_without_algebra_block_is_inferred(tmp_path, capsys):
    # rank and a default cutoff are read off the weight coordinates
    blob = {
        "points": [{"z": "0",
                    "weight": {"lambda_dot": ["1"], "level": "2",
                               "delta": "0"}}],
        "bethe_roots": [{"w": "1/2", "color": 1}],
    }
    path = tmp_path / "bare.json"
    path.write_text(json.dumps(blob))
    assert main(["bethe-check", str(path)]) == 1
    assert "OFF SHELL" in capsys.readouterr().out


# --------------------------------------------------------------- make-contour


def test_make_contour_matches_library_builder(tmp_path, capsys):
    path = tmp_path / "model.json"
    write_model(path, [])
    assert main(["make-contour", "--model", str(path),
                 "--pochhammer", "0,1", "--radius", "1/4"]) == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob == pochhammer((0.0, 1.0), radius=0.25).to_json()
    contour = Contour.from_json(blob)
    assert contour.is_closed
    assert contour.basepoint == 0.5


def test_make_contour_out_file_is_loadable(tmp_path, capsys):
    path = tmp_path / "model.json"
    write_model(path, [])
    cpath = tmp_path / "contour.json"
    assert main(["make-contour", "--model", str(path),
                 "--pochhammer", "1,0", "--out", str(cpath)]) == 0
    assert capsys.readouterr().out == ""
    contour = Contour.from_json(json.loads(cpath.read_text()))
    assert contour.is_closed
    assert len(contour.segments) == 12


def test_make_contour_rejects_bad_indices(tmp_path, capsys):
    path = tmp_path / "model.json"
    write_model(path, [])
    assert main(["make-contour", "--model", str(path),
                 "--pochhammer", "0,9"]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["make-contour", "--model", str(path),
                 "--pochhammer", "1"]) == 2
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------------ integrate


def test_integrate_stdout_matches_library(tmp_path, capsys):
    mpath = tmp_path / "model.json"
    blob = write_model(mpath, [{"w": "3/2", "color": 1}])
    cpath = tmp_path / "contour.json"
    assert main(["make-contour", "--model", str(mpath),
                 "--pochhammer", "0,1", "--out", str(cpath)]) == 0
    assert main(["integrate", "--model", str(mpath),
                 "--contour", str(cpath), "--exponent", "1"]) == 0
    got = json.loads(capsys.readouterr().out)

    d = MiuraData.from_json(blob)
    contour = Contour.from_json(json.loads(cpath.read_text()))
    want = twisted_integral(d, quasi_canonicalize(build_miura(d)), 1, contour)
    assert got["valid"] is True
    assert got["value"] == [want.value.real, want.value.imag]
    assert got["err"] == want.err
    assert got["segments"] == 12


def test_integrate_out_file(tmp_path, capsys):
    mpath = tmp_path / "model.json"
    write_model(mpath, [{"w": "3/2", "color": 1}])
    cpath = tmp_path / "contour.json"
    main(["make-contour", "--model", str(mpath), "--pochhammer", "0,1",
          "--out", str(cpath)])
    ipath = tmp_path / "integral.json"
    assert main(["integrate", "--model", str(mpath), "--contour", str(cpath),
                 "--exponent", "1", "--out", str(ipath)]) == 0
    assert capsys.readouterr().out == ""
    res = json.loads(ipath.read_text())
    assert set(res) == {"value", "err", "multiplier", "segments", "panels",
                        "valid"}


def test_integrate_rejects_missing_exponent(tmp_path, capsys):
    # the cutoff-5 canonical form carries coefficients at 1, 3, 5 only
    mpath = tmp_path / "model.json"
    write_model(mpath, [])
    cpath = tmp_path / "contour.json"
    main(["make-contour", "--model", str(mpath), "--pochhammer", "0,1",
          "--out", str(cpath)])
    assert main(["integrate", "--model", str(mpath), "--contour", str(cpath),
                 "--exponent", "7"]) == 2
    assert "error:" in capsys.readouterr().err


# --------------------------------------------------------------------- verify


def test_verify_suite_writes_report(tmp_path, capsys):
    report = tmp_path / "verify.json"
    assert main(["verify", "--suite", "algebra", "--seed", "3",
                 "--json", str(report)]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "overall:" in out
    rep = json.loads(report.read_text())
    assert rep["passed"] is True
    assert rep["suite"] == "algebra"
    assert rep["seed"] == 3
    assert rep["checks"] and all(c["passed"] for c in rep["checks"])


def test_verify_rejects_unknown_suite():
    with pytest.raises(SystemExit) as err:
        main(["verify", "--suite", "bogus"])
    assert err.value.code == 2


# ---------------------------------------------------------------- error paths


def test_missing_model_file(tmp_path, capsys):
    assert main(["bethe-check", str(tmp_path / "nope.json")]) == 2
    assert capsys.readouterr().err.startswith("error:")
