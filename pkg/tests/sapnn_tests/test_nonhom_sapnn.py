"""Test the asymptotic-preserving surrogate of the 1D BGK equation."""

import numpy as np
import pytest
import torch

from src.kinetic_uq.collision import RelaxationRate
from src.kinetic_uq.errors import ConfigurationError, InvalidInputError
from src.kinetic_uq.grid import SpatialGrid, VelocityGrid
from src.kinetic_uq.initial_data import sod_family
from src.kinetic_uq.nn import DTYPE, TrainingSchedule, build_mlp
from src.kinetic_uq.sapnn import (
    FieldTrainingData,
    NonhomPointSets,
    NonhomSapnnConfig,
    NonhomSurrogate,
    NonhomSurrogateSampler,
    node_tensors,
    nonhom_losses,
    train_nonhom,
)
from src.kinetic_uq.sapnn.data import FieldPointSet
from src.kinetic_uq.sapnn.physics import conserved_from_macro, maxwellian_nodes
from src.kinetic_uq.solvers import bgk_1d_trajectory, euler_1d_trajectory
from src.kinetic_uq.uq import RandomInputSpec


FINE_GRID = VelocityGrid(8.0, 32)
COARSE_GRID = VelocityGrid(8.0, 16)
SPATIAL = SpatialGrid(8)
BOX = RandomInputSpec(((-1.0, 1.0),))
TIMES = np.array([0.0, 0.02, 0.04])
Z_VALUES = np.array([[-0.5], [0.5]])


class UniformEquilibrium:
    """Field model of a constant Maxwellian, exact for every residual form."""

    def __init__(self, grid, rho=1.2, u_x=0.3, temp=0.8):
        self.nodes = node_tensors(grid)
        self.values = (rho, u_x, 0.0, temp)
        constants = [torch.tensor(value, dtype=DTYPE) for value in self.values]
        self.log_equilibrium = torch.log(maxwellian_nodes(*constants, self.nodes))

    def log_density(self, inputs):
        return self.log_equilibrium + 0.0 * inputs[..., :1]

    def macro(self, inputs):
        zero = 0.0 * inputs[..., 0]
        return tuple(zero + value for value in self.values)

    def conserved(self, inputs):
        return conserved_from_macro(*self.macro(inputs))


def _points(count, seed=0):
    generator = torch.Generator().manual_seed(seed)
    unit = torch.rand((count, 3), generator=generator, dtype=DTYPE)
    return torch.stack([unit[:, 0], 0.1 * unit[:, 1], 2.0 * unit[:, 2] - 1.0], dim=-1)


def _point_sets(boundary=None, data=None):
    return NonhomPointSets(
        residual_kinetic=_points(32, 0),
        residual_macro=_points(32, 1),
        moment=_points(32, 2),
        boundary=boundary,
        data=data,
    )


@pytest.fixture(scope="module")
def bgk_data():
    family = sod_family()
    rate = RelaxationRate(1.0, 1e-2)
    trajectories = [
        bgk_1d_trajectory(family.kinetic_init(z, SPATIAL, COARSE_GRID), rate, TIMES)
        for z in Z_VALUES
    ]
    return FieldTrainingData.from_trajectories(trajectories, Z_VALUES, BOX)


def test_uniform_equilibrium_has_zero_residuals():
    """Test every loss term on an exact constant equilibrium."""
    model = UniformEquilibrium(FINE_GRID)
    config = NonhomSapnnConfig(n_l=FINE_GRID.n_nodes, residual_form="maxwellian")
    losses = nonhom_losses(model, config, node_tensors(FINE_GRID), _point_sets())

    assert set(losses) == {"moment", "residual_kinetic", "residual_macro", "boundary", "data"}
    assert float(losses["residual_kinetic"]) < 1e-20
    assert float(losses["residual_macro"]) < 1e-20
    assert float(losses["moment"]) < 1e-12
    assert float(losses["boundary"]) == 0.0
    assert float(losses["data"]) == 0.0


def test_literal_relaxation_penalizes_non_unit_density():
    """Test that the literal residual form compares f with one, not with M."""
    model = UniformEquilibrium(FINE_GRID)
    config = NonhomSapnnConfig(n_l=FINE_GRID.n_nodes, residual_form="literal")
    losses = nonhom_losses(model, config, node_tensors(FINE_GRID), _point_sets())
    assert float(losses["residual_kinetic"]) > 1.0


def test_boundary_term_compares_density_and_conserved_targets():
    """Test the supervised mismatch against f and conserved targets."""
    model = UniformEquilibrium(FINE_GRID)
    config = NonhomSapnnConfig(n_l=FINE_GRID.n_nodes, residual_form="maxwellian")
    inputs = _points(8, 3)
    f_exact = torch.exp(model.log_density(inputs))
    u_exact = model.conserved(inputs)

    exact = FieldPointSet(inputs, f_exact, u_exact)
    losses = nonhom_losses(model, config, node_tensors(FINE_GRID), _point_sets(boundary=exact))
    assert float(losses["boundary"]) == 0.0

    offset = FieldPointSet(inputs, None, u_exact + 0.5)
    losses = nonhom_losses(model, config, node_tensors(FINE_GRID), _point_sets(data=offset))
    assert float(losses["data"]) == pytest.approx(0.25, rel=1e-12)


def test_velocity_output_must_match_grid():
    """Test that a g-net of the wrong width is rejected."""
    model = UniformEquilibrium(COARSE_GRID)
    config = NonhomSapnnConfig(n_l=FINE_GRID.n_nodes)
    with pytest.raises(ConfigurationError, match="does not match"):
        nonhom_losses(model, config, node_tensors(FINE_GRID), _point_sets())


def test_surrogate_validates_networks():
    """Test the macro-net output size and the shared input width."""
    with pytest.raises(ConfigurationError):
        NonhomSurrogate(build_mlp(3, 16, 1, 4), build_mlp(3, 3, 1, 4))
    with pytest.raises(ConfigurationError):
        NonhomSurrogate(build_mlp(3, 16, 1, 4), build_mlp(4, 4, 1, 4))


def test_training_data_from_kinetic_trajectories(bgk_data):
    """Test the stacked kinetic and conserved snapshots."""
    assert bgk_data.n_samples == 2
    assert bgk_data.kinetic.shape == (2, TIMES.size, SPATIAL.n_cells, COARSE_GRID.n_nodes)
    assert bgk_data.conserved.shape == (2, TIMES.size, SPATIAL.n_cells, 4)
    np.testing.assert_array_equal(bgk_data.restricted(0.025).times, [0.0, 0.02])

    with pytest.raises(InvalidInputError, match="start at t = 0"):
        FieldTrainingData(
            SPATIAL, BOX, Z_VALUES, TIMES[1:], bgk_data.conserved[:, 1:]
        )


def test_training_rejects_fluid_trajectories():
    """Test that Euler data cannot train the kinetic surrogate."""
    family = sod_family()
    trajectory = euler_1d_trajectory(family.euler_init([0.0], SPATIAL), TIMES)
    data = FieldTrainingData.from_trajectories([trajectory], np.zeros((1, 1)), BOX)
    with pytest.raises(InvalidInputError, match="kinetic trajectories"):
        train_nonhom(NonhomSapnnConfig(n_l=COARSE_GRID.n_nodes), data)


def test_training_checks_node_count(bgk_data):
    """Test that the configured node count must match the data grid."""
    with pytest.raises(ConfigurationError):
        train_nonhom(NonhomSapnnConfig(n_l=FINE_GRID.n_nodes), bgk_data)


def test_short_training_run_returns_sampler(bgk_data):
    """Test a few joint training steps and the resulting sampler."""
    config = NonhomSapnnConfig(
        n_l=COARSE_GRID.n_nodes,
        horizon=0.04,
        data_fraction=1.0,
        n_moment=16,
        n_residual_kinetic=16,
        n_residual_macro=16,
        n_boundary=16,
        n_data=16,
        g_depth=1,
        g_width=8,
        macro_depth=1,
        macro_width=8,
        schedule=TrainingSchedule(steps=3, learning_rate=1e-3),
    )
    sampler = train_nonhom(config, bgk_data)
    assert isinstance(sampler, NonhomSurrogateSampler)
    assert len(sampler.history) == 2

    field = sampler.evaluate([0.0], 0.02)
    assert field.values.shape == (SPATIAL.n_cells, *COARSE_GRID.shape)
    assert np.all(field.values > 0)
    state = sampler.macro([0.0], 0.02)
    assert np.all(state.rho > 0) and np.all(state.temp > 0)
