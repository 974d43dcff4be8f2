"""Test result tables, run directories and the manifest."""

import json

import numpy as np
import pandas as pd

from src.kinetic_uq.experiments import TABLE_COLUMNS, RunDirectory, RunManifest, table_frame
from src.kinetic_uq.experiments.tables import package_versions


def _manifest():
    return RunManifest(experiment="two-bump", config_sha256="0" * 64, seed=3)


def test_table_frame_orders_columns_and_rows():
    """Test the fixed column order and the deterministic row order."""
    rows = [
        {"replication": 1, "t": 0.5, "quantity": "f", "l1_error": 0.1, "method": "MC"},
        {"replication": 0, "t": 1.0, "quantity": "f", "l1_error": 0.2, "method": "MC"},
        {"replication": 0, "t": 0.5, "quantity": "f", "l1_error": 0.3, "method": "MC"},
    ]
    frame = table_frame("error_curves", rows)
    assert list(frame.columns) == list(TABLE_COLUMNS["error_curves"])
    assert frame["l1_error"].tolist() == [0.3, 0.2, 0.1]


def test_empty_table_keeps_header():
    """Test that a table without rows still has its columns."""
    frame = table_frame("coefficients", [])
    assert frame.empty
    assert list(frame.columns) == list(TABLE_COLUMNS["coefficients"])


def test_run_directory_records_outputs(tmp_path):
    """Test written files, stage timings and the manifest written last."""
    run = RunDirectory(tmp_path / "run", _manifest())
    run.write_config("experiment = 'two-bump'\n")
    with run.stage("estimate"):
        run.write_table("slopes", [{"method": "MC", "slope": -0.5, "intercept": 0.25}])
    run.write_json("calibration.json", {"mu_star": 0.15})
    run.write_table("slopes", [{"method": "MC", "slope": -0.5, "intercept": 0.25}])
    manifest_path = run.finish()

    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    assert manifest["outputs"] == ["config.toml", "slopes.csv", "calibration.json"]
    assert manifest["wall_times"]["estimate"] >= 0.0
    assert manifest["schema_version"] == 1
    assert manifest["seed"] == 3

    assert (tmp_path / "run" / "slopes.csv").read_text().splitlines() == [
        "method,slope,intercept",
        "MC,-5.0000000000e-01,2.5000000000e-01",
    ]


def test_table_files_are_byte_identical(tmp_path):
    """Test that identical rows give identical bytes."""
    rng = np.random.default_rng(0)
    rows = [
        {"L": int(size), "method": "MC", "replication": rep, "l1_error": float(rng.random())}
        for size in (10, 100)
        for rep in range(3)
    ]
    first = RunDirectory(tmp_path / "a", _manifest()).write_table("convergence", rows)
    second = RunDirectory(tmp_path / "b", _manifest()).write_table(
        "convergence", list(reversed(rows))
    )
    assert first.read_bytes() == second.read_bytes()
    assert pd.read_csv(first)["L"].tolist() == [10, 10, 10, 100, 100, 100]


def test_package_versions_cover_the_stack():
    """Test that versions are reported for every tracked package."""
    versions = package_versions()
    assert {"numpy", "scipy", "torch", "pandas", "pydantic"} <= set(versions)
    assert all(isinstance(value, str) and value for value in versions.values())
