"""Test runtime env configs, the repeated-warning filter and pretty printing."""

import json
import logging
from pathlib import Path

import numpy as np
import pytest

from src.utils import RepeatedWarningFilter, RuntimeConfigs, pretty_print


@pytest.fixture
def clean_env(monkeypatch):
    for name in ("KINETIC_UQ_OUTPUT_ROOT", "KINETIC_UQ_JOBS", "KINETIC_UQ_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_runtime_defaults(clean_env):
    """Test the defaults without env vars."""
    config = RuntimeConfigs.from_env_var()
    assert config.kinetic_uq_output_root == Path("outputs")
    assert config.kinetic_uq_jobs == 1
    assert config.kinetic_uq_log_level == "INFO"


def test_runtime_from_env(clean_env):
    """Test that prefixed env vars are read case-insensitively."""
    clean_env.setenv("KINETIC_UQ_JOBS", "4")
    clean_env.setenv("KINETIC_UQ_OUTPUT_ROOT", "/tmp/runs")
    clean_env.setenv("KINETIC_UQ_LOG_LEVEL", "debug")
    config = RuntimeConfigs.from_env_var()
    assert config.kinetic_uq_jobs == 4
    assert config.kinetic_uq_output_root == Path("/tmp/runs")
    assert config.kinetic_uq_log_level == "debug"


@pytest.mark.parametrize(("name", "value"), [("KINETIC_UQ_JOBS", "0"), ("KINETIC_UQ_LOG_LEVEL", "LOUD")])
def test_runtime_rejects_invalid_values(clean_env, name, value):
    """Test that invalid env vars raise ValueError."""
    clean_env.setenv(name, value)
    with pytest.raises(ValueError):
        RuntimeConfigs.from_env_var()


def _record(name, level, message):
    return logging.LogRecord(name, level, __file__, 1, message, None, None)


def test_repeated_warning_filter():
    """Test that each package warning passes once and other records always."""
    warning_filter = RepeatedWarningFilter()
    grid_warning = _record("src.kinetic_uq.grid", logging.WARNING, "tails truncated")
    assert warning_filter.filter(grid_warning)
    assert not warning_filter.filter(grid_warning)
    assert warning_filter.filter(_record("src.kinetic_uq.grid", logging.WARNING, "other"))
    assert warning_filter.filter(_record("src.kinetic_uq.grid", logging.INFO, "tails truncated"))
    assert warning_filter.filter(_record("src.kinetic_uq.grid", logging.INFO, "tails truncated"))

    outside = _record("numpy", logging.WARNING, "tails truncated")
    assert warning_filter.filter(outside)
    assert warning_filter.filter(outside)


def test_pretty_print_serializes_arrays_and_paths(capsys):
    """Test the JSON fallbacks for numpy values and paths."""
    output = pretty_print(
        {"small": np.arange(3.0), "large": np.zeros((5, 5)), "scalar": np.float64(0.5), "path": Path("a/b")}
    )
    data = json.loads(output)
    assert data["small"] == [0.0, 1.0, 2.0]
    assert data["large"] == {"shape": [5, 5], "min": 0.0, "max": 0.0}
    assert data["scalar"] == 0.5
    assert data["path"] == "a/b"
    assert capsys.readouterr().out.strip() == output
