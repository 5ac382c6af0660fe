from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from layered_elastica.config import (
    THREADS_ENV,
    GridSpec,
    RunConfig,
    atomic_write,
    format_csv,
    parallel_map,
    parse_vector,
    thread_cap,
)
from layered_elastica.errors import InvalidMediumError, ValidationError


def test_grid_points_first_axis_slowest() -> None:
    grid = GridSpec.parse("x1:0:1:3,x2:-1:1:2", 2)
    pts = grid.points()
    assert grid.size == 6
    np.testing.assert_allclose(pts[:3], [[0.0, -1.0], [0.0, 1.0], [0.5, -1.0]])


@pytest.mark.parametrize("text", ["x1:0:1:3", "x2:0:1:3,x1:0:1:3", "x1:0:1,x2:0:1:2", "x1:0:1:0,x2:0:1:2",
                                  "x1:a:1:3,x2:0:1:2"])
def test_bad_grids(text: str) -> None:
    with pytest.raises(ValidationError):
        GridSpec.parse(text, 2)


def test_parse_vector() -> None:
    assert parse_vector("[0.5, 1]") == [0.5, 1.0]
    assert parse_vector("0.5,1,2", 3) == [0.5, 1.0, 2.0]
    with pytest.raises(ValidationError):
        parse_vector("0.5,x")
    with pytest.raises(ValidationError):
        parse_vector("[1, 2]", 3)


def test_run_config_defaults() -> None:
    cfg = RunConfig.load("eval", None, grid="x1:0:1:2,x2:0:1:2")
    assert cfg.medium.dim == 2
    assert cfg.quad.tol == 1e-10
    assert cfg.grid is not None and cfg.grid.size == 4


def test_run_config_from_files(tmp_path: Path) -> None:
    medium = tmp_path / "medium.json"
    medium.write_text(json.dumps({"lambda": 1.0, "mu": 1.0, "rho_plus": 1.0, "rho_minus": 3.0, "omega": 2.0}))
    quad = tmp_path / "quad.json"
    quad.write_text(json.dumps({"tol": 1e-9}))
    cfg = RunConfig.load("eval", str(medium), str(quad), str(tmp_path / "out.csv"), 4, 3)
    assert cfg.medium.dim == 3
    assert cfg.medium.rho_minus == 3.0
    assert cfg.quad.tol == 1e-9
    assert cfg.seed == 4


def test_run_config_errors(tmp_path: Path) -> None:
    with pytest.raises(ValidationError, match="does not exist"):
        RunConfig.load("eval", str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ValidationError, match="not valid JSON"):
        RunConfig.load("eval", str(broken))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"lambda": 1.0, "mu": -1.0, "rho_plus": 1.0, "rho_minus": 3.0, "omega": 2.0}))
    with pytest.raises(InvalidMediumError):
        RunConfig.load("eval", str(bad))
    with pytest.raises(ValidationError, match="output directory"):
        RunConfig.load("eval", None, output_path=str(tmp_path / "nowhere" / "out.csv"))


def test_thread_cap(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(THREADS_ENV, "3")
    assert thread_cap() == 3
    monkeypatch.setenv(THREADS_ENV, "0")
    assert thread_cap() == 1
    monkeypatch.setenv(THREADS_ENV, "many")
    with pytest.raises(ValidationError):
        thread_cap()


def test_parallel_map_keeps_order(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(THREADS_ENV, "4")
    assert parallel_map(lambda v: v * v, range(10)) == [v * v for v in range(10)]


def test_csv_and_atomic_write(tmp_path: Path) -> None:
    text = format_csv(["x", "tag"], [[0.1, "p"], [1 / 3, "s"]])
    lines = text.splitlines()
    assert lines[0] == "x,tag"
    assert float(lines[2].split(",")[0]) == 1 / 3
    target = tmp_path / "out.csv"
    atomic_write(target, text)
    assert target.read_text() == text
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]
