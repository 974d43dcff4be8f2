"""Test the kinetic-uq command line and its exit codes."""

import json

import pytest

from src.kinetic_uq import cli
from src.kinetic_uq.errors import CalibrationBracketError
from src.kinetic_uq.nn import build_mlp, save_checkpoint


CONFIG = """
experiment = "two-bump"

[physics]
t_final = 0.5
n_times = 2
high_fidelity = "bgk"

[discretization]
n_per_dim = 16

[uq]
k_hf = 4
l_lf = 8
reference_cells = 1
reference_nodes = 2
"""


@pytest.fixture(autouse=True)
def quiet_environment(monkeypatch, mocker):
    for name in ("KINETIC_UQ_OUTPUT_ROOT", "KINETIC_UQ_JOBS", "KINETIC_UQ_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    mocker.patch.object(cli, "load_dotenv")
    mocker.patch.object(cli, "set_up_logging")


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "two_bump.toml"
    path.write_text(CONFIG, encoding="utf-8")
    return path


def test_run_succeeds(tmp_path, config_path, capsys):
    """Test a complete run and the printed summary."""
    status = cli.main(["run", str(config_path), "--output-root", str(tmp_path / "out")])
    assert status == cli.EXIT_OK
    assert (tmp_path / "out" / "two-bump" / "manifest.json").is_file()
    assert "error_curves.csv" in capsys.readouterr().out


def test_output_root_from_environment(tmp_path, config_path, monkeypatch):
    """Test that the env var sets the default output root."""
    monkeypatch.setenv("KINETIC_UQ_OUTPUT_ROOT", str(tmp_path / "env"))
    assert cli.main(["run", str(config_path)]) == cli.EXIT_OK
    assert (tmp_path / "env" / "two-bump" / "error_curves.csv").is_file()


def test_command_must_match_experiment(tmp_path, config_path):
    """Test that subcommands refuse experiments of another kind."""
    status = cli.main(["train", str(config_path), "--output-root", str(tmp_path)])
    assert status == cli.EXIT_DIAGNOSED


@pytest.mark.parametrize("argv_tail", [["--jobs", "0"], []])
def test_diagnosed_errors(tmp_path, config_path, argv_tail):
    """Test exit status 2 for bad job counts and missing configs."""
    target = str(config_path) if argv_tail else str(tmp_path / "absent.toml")
    assert cli.main(["run", target, *argv_tail]) == cli.EXIT_DIAGNOSED


def test_invalid_environment(config_path, monkeypatch):
    """Test that invalid env vars are diagnosed before running."""
    monkeypatch.setenv("KINETIC_UQ_JOBS", "many")
    assert cli.main(["run", str(config_path)]) == cli.EXIT_DIAGNOSED

    monkeypatch.setenv("KINETIC_UQ_JOBS", "1")
    monkeypatch.setenv("KINETIC_UQ_LOG_LEVEL", "chatty")
    assert cli.main(["run", str(config_path)]) == cli.EXIT_DIAGNOSED


def test_calibration_failure_is_diagnosed(tmp_path, mocker):
    """Test that a failed bracket maps to exit status 2."""
    path = tmp_path / "calibrate.toml"
    path.write_text('experiment = "calibrate"\n', encoding="utf-8")
    mocker.patch.object(
        cli, "run_calibration", side_effect=CalibrationBracketError([(0.05, 1.0), (0.5, 0.5)])
    )
    assert cli.main(["calibrate", str(path), "--output-root", str(tmp_path)]) == (
        cli.EXIT_DIAGNOSED
    )


def test_unexpected_failure(tmp_path, config_path, mocker):
    """Test exit status 1 for errors outside the package hierarchy."""
    mocker.patch.object(cli, "run_experiment", side_effect=RuntimeError("boom"))
    status = cli.main(["run", str(config_path), "--output-root", str(tmp_path)])
    assert status == cli.EXIT_UNEXPECTED


def test_inspect_prints_header(tmp_path, capsys):
    """Test the checkpoint summary of the inspect command."""
    path = tmp_path / "net.kuqnet"
    save_checkpoint(path, {"net": build_mlp(2, 1, 1, 4)}, {"kind": "hom", "horizon": 2.0})
    assert cli.main(["inspect", str(path)]) == cli.EXIT_OK

    out = capsys.readouterr().out
    assert "2 x 4 x 1" in out
    assert json.loads(out[out.index("{") :]) == {"kind": "hom", "horizon": 2.0}


def test_inspect_missing_checkpoint(tmp_path):
    """Test that inspecting a missing file is diagnosed."""
    assert cli.main(["inspect", str(tmp_path / "absent.kuqnet")]) == cli.EXIT_DIAGNOSED


def test_parser_requires_a_command():
    """Test that argparse rejects an empty command line."""
    with pytest.raises(SystemExit):
        cli.main([])
