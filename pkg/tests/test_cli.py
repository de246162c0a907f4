import csv
import json
import xml.etree.ElementTree as ET

import pytest

from xicontour.cli import main
from xicontour.config import load_config, packaged_config, parse_config
from xicontour.exceptions import ConfigError
from xicontour.report import basis_of, run_verification

SVG = "{http://www.w3.org/2000/svg}"

SMALL = """\
case: small
spectrum:
  - [0, 1, 0, 4, 1]
  - [0, 0, 1, 1, 4]
sign_classes: ["+--++", "+++++"]
window: 8.0
grid: 1024
"""


@pytest.mark.parametrize("name", ["pentagon", "inf", "two_circles", "sqrt2"])
def test_packaged_configs_load(name):
    cfg = load_config(packaged_config(name))
    assert cfg.case == name
    assert cfg.spectrum.t >= 3


def test_config_defaults():
    cfg = parse_config("spectrum: [[0, 1, 2]]\n", source="x.yaml")
    assert cfg.case == "x" and cfg.sign_classes == "attained" and cfg.window == 8.0


def test_sign_classes_normalized():
    cfg = parse_config(SMALL)
    assert cfg.sign_classes == [(1, -1, -1, 1, 1), (1, 1, 1, 1, 1)]
    cfg = parse_config(SMALL.replace('"+--++"', '"-++--"'))
    assert cfg.sign_classes[0] == (1, -1, -1, 1, 1)


@pytest.mark.parametrize("text,field,line", [
    (SMALL + "colour: red\n", "colour", 8),
    (SMALL.replace('"+++++"', '"++0++"'), "sign_classes[1]", 5),
    (SMALL.replace('"+++++"', '"+++"'), "sign_classes[1]", 5),
    (SMALL.replace("window: 8.0", "window: -2"), "window", 6),
    (SMALL.replace("grid: 1024", "grid: lots"), "grid", 7),
    (SMALL + "points:\n  p: [1, 2, 3]\n", "points.p", 9),
    (SMALL + "points:\n  p: [1, 2, 0, 1, 1]\n", "points.p", 9),
    (SMALL + "tolerances: {svd: 1.0e-10, speed: 3}\n", "tolerances.speed", 8),
    (SMALL + "expect:\n  signatures: {nobody: [1, 0]}\n", "expect.signatures", 9),
    ("case: x\n", "spectrum", None),
    ("spectrum:\n  - [0, 1, 2]\n  - [0, 1]\n", "spectrum", 1),
])
def test_config_errors_name_line_and_field(text, field, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.field == field
    assert err.value.line == line
    assert field in str(err.value)


def test_yaml_syntax_error_has_line():
    with pytest.raises(ConfigError) as err:
        parse_config("spectrum: [[0, 1], [0\ncase: x\n")
    assert err.value.line is not None


def test_bounds_command(capsys):
    assert main(["bounds", "--n", "2", "--lines", "3"]) == 0
    out = capsys.readouterr().out
    assert "isotopyBound: 11" in out
    assert "chamberBound: 2" in out
    assert "'regions': 7" in out


def test_bounds_needs_parameters(capsys):
    assert main(["bounds"]) == 2
    assert "--n" in capsys.readouterr().err


def test_missing_config_is_usage_error(tmp_path, capsys):
    assert main(["verify", "--config", str(tmp_path / "nope.yaml")]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_bad_config_exit_code(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text(SMALL + "colour: red\n")
    assert main(["contour", "--config", str(p)]) == 2


def test_contour_outputs(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL)
    assert main(["contour", "--config", str(p), "--out", str(tmp_path / "out")]) == 0
    case = tmp_path / "out" / "small"
    with open(case / "+--++.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["kind", "piece", "index", "theta", "v1", "v2"]
    assert {r[0] for r in rows[1:]} >= {"arc", "cusp"}
    # the empty class still gets a file, with only the header
    with open(case / "+++++.csv") as fh:
        assert list(csv.reader(fh)) == [rows[0]]
    root = ET.parse(case / "contour.svg").getroot()
    assert root.tag == SVG + "svg" and root.get("version") == "1.1"
    ids = {g.get("id") for g in root.iter(SVG + "g")}
    assert {"arcs", "completion", "cusps"} <= ids


def test_chambers_report_deterministic(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL)
    reports = []
    for k, workers in enumerate((1, 2)):
        out = tmp_path / f"run{k}"
        assert main(["chambers", "--config", str(p), "--out", str(out), "--workers", str(workers)]) == 0
        reports.append((out / "small" / "report.json").read_bytes())
    assert reports[0] == reports[1]
    data = json.loads(reports[0])
    assert data["signs"]["+--++"]["chamberCount"] == 3
    assert data["signs"]["+--++"]["innerChambers"] == 1
    assert data["signs"]["+++++"]["chamberCount"] == 1
    assert "timestamp" not in reports[0].decode()
    meta = json.loads((tmp_path / "run0" / "small" / "report.meta.json").read_text())
    assert "timestamp" in meta


def test_verify_sqrt2_passes(capsys):
    assert main(["verify", "--config", "sqrt2"]) == 0
    assert "3/3 checks passed" in capsys.readouterr().out


def test_verify_wrong_golden_fails(tmp_path):
    text = packaged_config("sqrt2").read_text().replace("q: false", "q: true")
    p = tmp_path / "wrong.yaml"
    p.write_text(text)
    assert main(["verify", "--config", str(p)]) == 1


def test_corrupted_basis_fails_verification():
    cfg = load_config(packaged_config("sqrt2"))
    B = basis_of(cfg).copy()
    B[0, 0] += 1e-3
    checks = run_verification(cfg, basis=B)
    assert not next(c for c in checks if c.name == "nullspace residual").passed


def test_verify_two_circles(capsys):
    assert main(["verify", "--config", "two_circles"]) == 0
    out = capsys.readouterr().out
    assert "separated g1/g2" in out and "FAIL" not in out
