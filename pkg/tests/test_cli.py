from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
import pytest

from layered_elastica.cli import EXIT_INVALID, EXIT_OK, main


def _rows(path: Path) -> list:
    lines = path.read_text().splitlines()
    return [line.split(",") for line in lines]


def test_unknown_flag_is_a_usage_error() -> None:
    assert main(["eval", "--bogus"]) == EXIT_INVALID


def test_missing_subcommand() -> None:
    assert main([]) == EXIT_INVALID


def test_missing_medium_file(tmp_path: Path) -> None:
    code = main(["eval", "--medium", str(tmp_path / "none.json"), "--source", "[0, 1]", "--grid", "x1:0:1:2,x2:0:1:2"])
    assert code == EXIT_INVALID


def test_grid_must_match_dimension() -> None:
    assert main(["eval", "--source", "[0, 1]", "--grid", "x1:0:1:2"]) == EXIT_INVALID


def test_eval_csv(tmp_path: Path) -> None:
    out = tmp_path / "g.csv"
    code = main(["eval", "--source", "[0.1, 0.8]", "--grid", "x1:-1:1:3,x2:-0.5:0.5:2", "--out", str(out)])
    assert code == EXIT_OK
    rows = _rows(out)
    assert rows[0] == ["x1", "x2", "re_G11", "im_G11", "re_G12", "im_G12", "re_G21", "im_G21", "re_G22", "im_G22"]
    assert len(rows) == 1 + 6
    values = np.array(rows[1:], dtype=float)
    assert np.all(np.isfinite(values))
    np.testing.assert_allclose(values[0, :2], [-1.0, -0.5])


def test_eval_grid_crossing_the_interface(tmp_path: Path, caplog: pytest.LogCaptureFixture) -> None:
    out = tmp_path / "g.csv"
    # the row x2 = 0 lies on the interface; (0.002, 0) also sits next to the source's mirror image
    with caplog.at_level(logging.WARNING, logger="layered_elastica.cli"):
        code = main(["eval", "--source", "[0, 0.001]", "--grid", "x1:-0.998:1.002:3,x2:-0.5:0.5:3", "--out", str(out)])
    assert code == EXIT_OK
    values = np.array(_rows(out)[1:], dtype=float)
    assert values.shape == (9, 10)
    bad = np.isnan(values[:, 2:]).any(axis=1)
    assert bad.sum() == 1
    np.testing.assert_allclose(values[bad, :2], [[0.002, 0.0]], atol=1e-12)
    assert np.all(np.isfinite(values[~bad, 2:]))
    assert "SlowDecayError" in caplog.text


def test_farfield_csv(tmp_path: Path) -> None:
    out = tmp_path / "ff.csv"
    assert main(["farfield", "--source", "[0, 0.5]", "--angles", "8", "--out", str(out)]) == EXIT_OK
    rows = _rows(out)
    assert rows[0] == ["angle", "wave_type", "j", "re", "im"]
    assert len(rows) == 1 + 8 * 4
    assert {r[1] for r in rows[1:]} == {"p", "s"}


def test_verify_writes_report_and_passes(tmp_path: Path) -> None:
    out = tmp_path / "report.json"
    code = main(["verify", "stress-identity", "--suite", "determinant-scan", "--samples", "10", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["pass"] is True
    assert doc["suites"] == ["stress-identity", "determinant-scan"]
    assert {r["check"] for r in doc["reports"]} == {"stress-identity-2d", "stress-identity-3d", "determinant-scan"}


def test_verify_needs_a_suite() -> None:
    assert main(["verify"]) == EXIT_INVALID
    assert main(["verify", "no-such-suite"]) == EXIT_INVALID


def test_hidden_specfun_table(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["specfun-probe", "--order", "1", "--z", "2.0,0.5", "--z=-3,0"]) == EXIT_OK
    rows = [line.split(",") for line in capsys.readouterr().out.splitlines()]
    assert rows[0][:3] == ["order", "re_z", "im_z"]
    assert len(rows) == 3
    assert float(rows[2][1]) == -3.0


def test_solve_requires_out(tmp_path: Path) -> None:
    profile = tmp_path / "flat.json"
    profile.write_text(json.dumps({"type": "flat"}))
    code = main(["solve", "--profile", str(profile), "--source", "[0, 1, 1, 0, 0, 0]", "--R", "2"])
    assert code == EXIT_INVALID


def test_solve_rejects_source_below_interface(tmp_path: Path) -> None:
    profile = tmp_path / "bump.json"
    profile.write_text(json.dumps({"type": "bump", "height": 0.3, "width": 0.5}))
    code = main(["solve", "--profile", str(profile), "--source", "[0, 0.1, 1, 0, 0, 0]", "--R", "2",
                 "--nodes", "16", "--ppw", "4", "--out", str(tmp_path / "sol.json")])
    assert code == EXIT_INVALID


@pytest.mark.slow
def test_solve_writes_json_and_field_grid(tmp_path: Path) -> None:
    profile = tmp_path / "bump.json"
    profile.write_text(json.dumps({"type": "bump", "height": 0.2, "width": 0.6}))
    out = tmp_path / "sol.json"
    code = main(["solve", "--profile", str(profile), "--source", "[0.1, 0.9, 0, 0, 1, 0]", "--R", "2",
                 "--nodes", "32", "--ppw", "6", "--grid", "x1:-3:3:4,x2:-3:3:4", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["field_csv"] == "sol.csv"
    assert len(doc["density"]) == 2 * 32
    rows = _rows(tmp_path / "sol.csv")
    assert rows[0] == ["x1", "x2", "re_u1", "im_u1", "re_u2", "im_u2"]
    assert len(rows) == 1 + 16
