"""Test surrogate checkpoints and extrapolation warnings of the samplers."""

import logging

import numpy as np
import pytest

from src.kinetic_uq.errors import ConfigurationError, InvalidInputError
from src.kinetic_uq.grid import SpatialGrid, VelocityGrid
from src.kinetic_uq.initial_data import TwoBumpFamily
from src.kinetic_uq.nn import build_mlp, save_checkpoint
from src.kinetic_uq.sapnn import (
    EulerPinnConfig,
    EulerSurrogate,
    EulerSurrogateSampler,
    HomSapnnConfig,
    HomSurrogate,
    HomSurrogateSampler,
    NonhomSapnnConfig,
    NonhomSurrogate,
    NonhomSurrogateSampler,
    load_surrogate,
    save_surrogate,
    surrogate_evaluate,
)
from src.kinetic_uq.uq import RandomInputSpec


GRID = VelocityGrid(8.0, 8)
SPATIAL = SpatialGrid(10)
FIELD_BOX = RandomInputSpec(((-1.0, 1.0),))
FAMILY = TwoBumpFamily()


def _initial(z):
    return FAMILY.initial(z, GRID)


@pytest.fixture
def hom_sampler():
    config = HomSapnnConfig(horizon=1.0, depth=1, width=8, initial_condition="hard")
    net = build_mlp(2, 1, 1, 8, seed=4, input_shift=[-1.0, 0.5], input_scale=[3.0, 0.5])
    model = HomSurrogate(net, config.horizon, config.initial_condition)
    return HomSurrogateSampler(model, GRID, _initial, FAMILY.random_input(), config)


def test_homogeneous_round_trip(tmp_path, hom_sampler):
    """Test that a reloaded homogeneous surrogate predicts identically."""
    path = save_surrogate(tmp_path / "hom.kuqnet", hom_sampler)
    restored = load_surrogate(path, _initial)

    assert isinstance(restored, HomSurrogateSampler)
    assert restored.config == hom_sampler.config
    assert restored.box.box == hom_sampler.box.box
    times = [0.0, 0.5, 1.0]
    np.testing.assert_array_equal(
        restored.trajectory([0.2, 0.3], times).values,
        hom_sampler.trajectory([0.2, 0.3], times).values,
    )


def test_homogeneous_load_needs_initial_family(tmp_path, hom_sampler):
    """Test that a homogeneous checkpoint cannot be used without f0(z)."""
    path = save_surrogate(tmp_path / "hom.kuqnet", hom_sampler)
    with pytest.raises(ConfigurationError, match="initial-data family"):
        load_surrogate(path)


def test_nonhomogeneous_round_trip(tmp_path):
    """Test that both networks of the kinetic surrogate are restored."""
    config = NonhomSapnnConfig(
        n_l=GRID.n_nodes, g_depth=1, g_width=8, macro_depth=1, macro_width=8
    )
    model = NonhomSurrogate(build_mlp(3, GRID.n_nodes, 1, 8, seed=1), build_mlp(3, 4, 1, 8, seed=2))
    sampler = NonhomSurrogateSampler(model, GRID, SPATIAL, FIELD_BOX, config)
    restored = load_surrogate(save_surrogate(tmp_path / "nonhom.kuqnet", sampler))

    assert isinstance(restored, NonhomSurrogateSampler)
    assert restored.spatial.n_cells == SPATIAL.n_cells
    np.testing.assert_array_equal(
        restored.evaluate([0.1], 0.05).values, sampler.evaluate([0.1], 0.05).values
    )
    np.testing.assert_array_equal(
        restored.macro([0.1], 0.05).temp, sampler.macro([0.1], 0.05).temp
    )


def test_euler_round_trip(tmp_path):
    """Test that the Euler surrogate is restored with its grids."""
    config = EulerPinnConfig(depth=1, width=8)
    sampler = EulerSurrogateSampler(
        EulerSurrogate(build_mlp(3, 4, 1, 8, seed=3)), GRID, SPATIAL, FIELD_BOX, config
    )
    restored = load_surrogate(save_surrogate(tmp_path / "euler.kuqnet", sampler))

    assert isinstance(restored, EulerSurrogateSampler)
    assert restored.grid == GRID
    np.testing.assert_array_equal(
        restored.macro([-0.4], 0.01).rho, sampler.macro([-0.4], 0.01).rho
    )


def test_plain_network_checkpoint_is_not_a_surrogate(tmp_path):
    """Test that checkpoints without surrogate metadata are rejected."""
    path = tmp_path / "plain.kuqnet"
    save_checkpoint(path, build_mlp(2, 1, 1, 4), {"note": "plain"})
    with pytest.raises(InvalidInputError, match="lacks surrogate metadata"):
        load_surrogate(path, _initial)


def test_unknown_surrogate_kind(tmp_path):
    """Test that an unknown kind is reported."""
    path = tmp_path / "other.kuqnet"
    metadata = {"kind": "other", "grid": {"extent": 8.0, "n_per_dim": 8}, "box": [[0.0, 1.0]]}
    save_checkpoint(path, build_mlp(2, 1, 1, 4), metadata)
    with pytest.raises(InvalidInputError, match="unknown surrogate kind"):
        load_surrogate(path)


def test_missing_checkpoint(tmp_path):
    """Test that a missing file is a configuration error."""
    with pytest.raises(ConfigurationError):
        load_surrogate(tmp_path / "absent.kuqnet")


def test_extrapolation_is_logged(caplog, hom_sampler):
    """Test warnings for queries outside the training box and window."""
    with caplog.at_level(logging.WARNING, logger="src.kinetic_uq.sapnn.sampler"):
        hom_sampler.evaluate([0.0, 0.5], 0.5)
        assert not [r for r in caplog.records if r.name.endswith("sapnn.sampler")]

        hom_sampler.evaluate([0.9, 1.5], 0.5)
        assert "outside its training box" in caplog.text

        caplog.clear()
        surrogate_evaluate(hom_sampler, [0.0, 0.5], 1.5)
        assert "outside its training window" in caplog.text


def test_evaluator_fixes_time(hom_sampler):
    """Test that the per-sample evaluator matches direct evaluation."""
    evaluate = hom_sampler.evaluator(0.25)
    np.testing.assert_array_equal(
        evaluate(np.array([0.3, 0.1])).values, hom_sampler.evaluate([0.3, 0.1], 0.25).values
    )
