"""Test the desk-scale homogeneous surrogates trained from the shipped configs."""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.kinetic_uq.collision import build_spectral_plan
from src.kinetic_uq.experiments import parse_config, run_training
from src.kinetic_uq.grid import VelocityGrid
from src.kinetic_uq.initial_data import TwoBumpFamily
from src.kinetic_uq.sapnn import load_surrogate
from src.kinetic_uq.solvers import solve_hom_boltzmann
from src.kinetic_uq.uq import gauss_lobatto_reference


CONFIG_DIR = Path(__file__).parents[2] / "configs"
GRID = VelocityGrid(10.0, 32)
FAMILY = TwoBumpFamily()
T_FINAL = 2.0


def _train(name: str, checkpoint: str, target: Path, root: Path):
    text = (CONFIG_DIR / name).read_text(encoding="utf-8")
    text = text.replace(checkpoint, target.as_posix())
    result = run_training(parse_config(text), text, root)
    return result, load_surrogate(target, lambda z: FAMILY.initial(z, GRID))


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    root = tmp_path_factory.mktemp("surrogates")
    nominal = _train(
        "train_hom_desk.toml",
        "checkpoints/two_bump_mu1.kuqnet",
        root / "mu1.kuqnet",
        root / "nominal",
    )
    calibrated = _train(
        "train_hom_calibrated_desk.toml",
        "checkpoints/two_bump_mu_star.kuqnet",
        root / "mu_star.kuqnet",
        root / "calibrated",
    )
    return nominal, calibrated


@pytest.mark.integration_test
def test_desk_surrogate_reproduces_relaxation(trained):
    """Test held-out accuracy, positivity and the converged moment loss."""
    (result, _), _ = trained
    validation = pd.read_csv(result.directory / "validation.csv")
    assert len(validation) == 10
    assert np.all(validation["relative_l1_error"] < 5e-2)
    assert np.all(validation["min_value"] > 0)

    history = pd.read_csv(result.directory / "loss_history.csv")
    assert history["moment"].iloc[-1] <= 1e-4


@pytest.mark.integration_test
def test_calibrated_surrogate_is_closer_to_boltzmann(trained):
    """Test that the calibrated-rate surrogate mean is closer to the Boltzmann mean."""
    (_, nominal), (result, calibrated) = trained
    assert result.manifest.mu_star is not None
    box = FAMILY.random_input()
    plan = build_spectral_plan(GRID)

    def _boltzmann(z: np.ndarray) -> np.ndarray:
        f0 = FAMILY.initial(z, GRID)
        return solve_hom_boltzmann(f0, 1.0, T_FINAL, 0.02, plan).final().values

    reference = gauss_lobatto_reference(box, _boltzmann, 4, 3, jobs=4)
    errors = {}
    for name, sampler in (("nominal", nominal), ("calibrated", calibrated)):
        mean = gauss_lobatto_reference(
            box, lambda z, s=sampler: s.evaluate(z, T_FINAL).values, 4, 3
        )
        errors[name] = np.sum(np.abs(mean - reference)) * GRID.cell_area

    assert errors["calibrated"] < errors["nominal"]
