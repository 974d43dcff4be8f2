"""Test validation of experiment TOML files."""

import tomllib
from pathlib import Path

import pytest

from src.kinetic_uq.errors import ConfigurationError
from src.kinetic_uq.experiments import (
    ExperimentConfig,
    config_hash,
    load_config,
    parse_config,
)


CONFIG_DIR = Path(__file__).parents[2] / "configs"

BASE = """
experiment = "two-bump"

[physics]
problem = "two-bump"
high_fidelity = "bgk"

[discretization]
n_per_dim = 16

[uq]
k_hf = 4
l_lf = 16
"""


def test_defaults_fill_missing_sections():
    """Test that a minimal file validates with documented defaults."""
    config = parse_config('experiment = "two-bump"')
    assert config.physics.problem == "two-bump"
    assert config.physics.eps == 1.0
    assert config.discretization.n_per_dim == 32
    assert [method.name for method in config.uq.methods] == ["MC"]
    assert config.physics.is_homogeneous


def test_controls_are_collected_in_first_use_order():
    """Test the union of control fidelities over all methods."""
    text = BASE + """
[[uq.methods]]
name = "a"
kind = "mscv"
controls = ["maxwellian"]

[[uq.methods]]
name = "b"
kind = "mmscv"
controls = ["initial", "maxwellian"]
"""
    assert parse_config(text).uq.controls == ["maxwellian", "initial"]


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("experiment = ", "not valid TOML"),
        (BASE + "\n[extra]\nkey = 1\n", "invalid experiment config"),
        ('experiment = "sod"', "needs physics.problem"),
        (
            'experiment = "calibrate"\n[physics]\nproblem = "sod"',
            "two-bump problem only",
        ),
        (
            'experiment = "train-nonhom"',
            "needs a shock-tube problem",
        ),
        (BASE.replace("n_per_dim = 16", "n_per_dim = 15"), "must be even"),
        (BASE.replace("l_lf = 16", "l_lf = 2"), "must be at least k_hf"),
        (
            BASE + '\n[[uq.methods]]\nname = "x"\nkind = "mscv"\n',
            "cannot use 0 control",
        ),
        (
            BASE + '\n[[uq.methods]]\nname = "x"\nkind = "mscv"\ncontrols = ["euler"]\n',
            "not available for two-bump",
        ),
        (
            BASE + '\n[[uq.methods]]\nname = "x"\n\n[[uq.methods]]\nname = "x"\n',
            "must be unique",
        ),
        (BASE.replace('high_fidelity = "bgk"', "mu = -1.0"), "mu must be positive"),
    ],
)
def test_invalid_configs_are_rejected(text, message):
    """Test that schema and consistency violations raise ConfigurationError."""
    with pytest.raises(ConfigurationError, match=message):
        parse_config(text)


def test_missing_checkpoint_is_reported(tmp_path):
    """Test that a surrogate control needs an existing checkpoint."""
    text = BASE + f"""
[surrogate]
checkpoint = "{(tmp_path / 'absent.kuqnet').as_posix()}"

[[uq.methods]]
name = "x"
kind = "mscv"
controls = ["sapnn"]
"""
    with pytest.raises(ConfigurationError, match="missing checkpoints"):
        parse_config(text)

    (tmp_path / "absent.kuqnet").write_bytes(b"")
    assert parse_config(text).uq.controls == ["sapnn"]


def test_load_config_returns_verbatim_text(tmp_path):
    """Test reading a file together with its exact text."""
    path = tmp_path / "run.toml"
    path.write_text(BASE, encoding="utf-8")
    config, text = load_config(path)
    assert text == BASE
    assert config.uq.k_hf == 4
    assert config_hash(text) == config_hash(BASE)
    assert config_hash(text) != config_hash(BASE + "\n")

    with pytest.raises(ConfigurationError, match="does not exist"):
        load_config(tmp_path / "absent.toml")


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.toml")), ids=lambda p: p.name)
def test_shipped_configs_validate(path):
    """Test that every shipped config satisfies the schema."""
    config = ExperimentConfig.model_validate(tomllib.loads(path.read_text(encoding="utf-8")))
    assert config.experiment
