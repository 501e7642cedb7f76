import csv
import json

import numpy as np
import pytest

import nucspec.resolvent
from nucspec.cli import SCAN_HEADER, SPECTRUM_HEADER, main, parse_contour, parse_grid, InputError

RANK_ONE = "space: lattice-l2\nterms:\n  - functional: [[0, 3.0]]\n    vector: [[0, 1.0]]\n"


@pytest.fixture
def op(tmp_path):
    p = tmp_path / "r1.yaml"
    p.write_text(RANK_ONE)
    return p


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_spectrum_rank_one(op, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["spectrum", "--operator", str(op), "--n", "100", "--out", str(out)]) == 0
    rows = _rows(out / "spectrum.csv")
    assert rows[0] == SPECTRUM_HEADER
    assert len(rows) == 2
    assert float(rows[1][0]) == pytest.approx(np.sqrt(13), abs=1e-9)
    assert rows[1][2] == "1" and rows[1][4] == "true"
    meta = json.loads((out / "spectrum.json").read_text())
    assert meta["eigenvalue_count"] == 1
    assert meta["lieb_thirring_sum"] == pytest.approx((np.sqrt(13) - 2) ** 4 / 9, abs=1e-10)
    assert "eigenvalues: 1" in capsys.readouterr().out


def test_spectrum_zero_operator(tmp_path):
    p = tmp_path / "z.yaml"
    p.write_text("terms: []\n")
    assert main(["spectrum", "--operator", str(p), "--out", str(tmp_path)]) == 0
    assert _rows(tmp_path / "spectrum.csv") == [SPECTRUM_HEADER]


def test_spectrum_structured_text(op, tmp_path):
    import yaml

    assert main(["spectrum", "--operator", str(op), "--n", "60", "--format", "structured-text", "--out", str(tmp_path)]) == 0
    doc = yaml.safe_load((tmp_path / "spectrum.yaml").read_text(encoding="utf-8"))
    assert doc["columns"] == SPECTRUM_HEADER
    assert doc["rows"][0]["multiplicity"] == 1


@pytest.mark.parametrize("delta", ["0", "-0.1"])
def test_bad_delta_exit_2(op, delta, capsys):
    assert main(["spectrum", "--operator", str(op), "--delta", delta]) == 2
    assert "delta" in capsys.readouterr().err


def test_parse_error_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("terms:\n  - functional: [[0, 1]]\n    vector: [[0, zz]]\n")
    assert main(["spectrum", "--operator", str(p)]) == 2
    assert "bad.yaml:3" in capsys.readouterr().err


def test_missing_operator_exit_2():
    assert main(["spectrum"]) == 2


def test_det_scan(op, tmp_path):
    assert main(["det-scan", "--operator", str(op), "--grid", "3:5:11,0:0:1", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "det_scan.csv")
    assert rows[0] == SCAN_HEADER
    z = np.array([float(r[0]) for r in rows[1:]])
    d = np.array([float(r[2]) for r in rows[1:]])
    assert d[np.isclose(z, 4.0)][0] == pytest.approx(0.318517, abs=1e-6)
    # the real determinant changes sign across sqrt(13)
    i = np.searchsorted(z, np.sqrt(13))
    assert d[i - 1] < 0 < d[i]


def test_det_scan_zero_operator(tmp_path):
    p = tmp_path / "z.yaml"
    p.write_text("terms: []\n")
    assert main(["det-scan", "--operator", str(p), "--grid=-4:4:5,1:2:3", "--out", str(tmp_path)]) == 0
    for r in _rows(tmp_path / "det_scan.csv")[1:]:
        assert float(r[2]) == 1.0 and float(r[3]) == 0.0 and float(r[4]) == 0.0


def test_det_scan_deterministic(op, tmp_path):
    args = ["det-scan", "--operator", str(op), "--grid=-3:3:7,0.5:1.5:3"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "det_scan.csv").read_bytes() == (tmp_path / "b" / "det_scan.csv").read_bytes()


def test_det_scan_grid_touching_band(op):
    assert main(["det-scan", "--operator", str(op), "--grid=-3:3:7,0:0:1"]) == 2
    assert main(["det-scan", "--operator", str(op), "--grid", "nonsense"]) == 2


def test_det_scan_contour(op, tmp_path, capsys):
    assert main(["det-scan", "--operator", str(op), "--grid", "4:4:1,0:0:1", "--contour", "3.6,0,0.2,64", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "det_scan.json").read_text())["winding"]["count"] == 1
    assert main(["det-scan", "--operator", str(op), "--grid", "4:4:1,0:0:1", "--contour", "0,0,3,64"]) == 2


def test_interval_default(tmp_path):
    assert main(["interval", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "interval.csv")
    assert len(rows) == 2
    assert float(rows[1][0]) == pytest.approx(1 / (1 - np.e), abs=1e-6)
    meta = json.loads((tmp_path / "interval.json").read_text())
    assert meta["lieb_thirring_sum"] == pytest.approx(0.1245996, abs=1e-6)
    assert meta["band"] == [0.0, 1.0]


def test_interval_file_and_nodes(tmp_path):
    p = tmp_path / "iv.yaml"
    p.write_text("scenario: interval\nkernel: {name: constant, value: 0}\n")
    assert main(["interval", "--operator", str(p), "--out", str(tmp_path)]) == 0
    assert _rows(tmp_path / "interval.csv") == [SPECTRUM_HEADER]
    assert main(["interval", "--nodes", "3"]) == 2


def test_jensen(op, tmp_path):
    assert main(["jensen", "--operator", str(op), "--contour", "0,0,0.9,8192", "--n", "60", "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / "jensen.json").read_text())
    assert meta["residual"] < 1e-6
    assert main(["jensen", "--operator", str(op), "--contour", "0.1,0,0.5,64"]) == 2


def test_verify_single_suite(tmp_path):
    assert main(["verify", "--suite", "det_bound", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] and report["suites"][0]["violations"] == 0
    assert report["seed"] == 20240917
    assert main(["verify", "--suite", "nope"]) == 2


def test_verify_negative_control(monkeypatch, tmp_path, capsys):
    # the wrong root of w + 1/w = z gives |w| > 1 and a bogus norm bound
    real = nucspec.resolvent.small_root

    def large_root(z):
        p = real(z)
        return nucspec.resolvent.ResolventPoint(p.z, 1 / p.w, -p.sqrt_branch)

    monkeypatch.setattr(nucspec.resolvent, "small_root", large_root)
    assert main(["verify", "--suite", "resolvent_bound", "--out", str(tmp_path)]) == 1
    report = json.loads((tmp_path / "verify.json").read_text())
    suite = report["suites"][0]
    assert suite["violations"] > 0
    assert suite["violating_sample"] is not None
    assert "FAIL resolvent_bound" in capsys.readouterr().out


def test_parsers():
    xs, ys = parse_grid("0:1:3,2:2:1")
    np.testing.assert_array_equal(xs, [0, 0.5, 1])
    assert parse_contour("1,2,0.5,32").center == 1 + 2j
    with pytest.raises(InputError):
        parse_grid("0:1,2:3:4")
    with pytest.raises(InputError):
        parse_contour("1,2,-1,32")
