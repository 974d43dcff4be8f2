"""Test the exact BGK relaxation and the Boltzmann time integrator."""

import numpy as np
import pytest

from src.kinetic_uq.collision import RelaxationRate, build_spectral_plan
from src.kinetic_uq.errors import ConfigurationError, InvalidInputError
from src.kinetic_uq.grid import (
    Distribution,
    VelocityGrid,
    conserved_quantities,
    entropy,
    maxwellian,
    moments,
)
from src.kinetic_uq.initial_data import two_bump
from src.kinetic_uq.solvers import (
    HomTrajectory,
    hom_bgk_trajectory,
    solve_hom_bgk,
    solve_hom_boltzmann,
)


GRID = VelocityGrid(12.0, 48)
FINE_GRID = VelocityGrid(10.0, 64)


def bkw(grid: VelocityGrid, t: float, eps: float = 1.0) -> Distribution:
    """Exact self-similar solution for unit density and temperature."""
    k = 1.0 - 0.5 * np.exp(-t / (8.0 * eps))
    speed2 = grid.speed_squared
    values = (
        np.exp(-speed2 / (2 * k))
        / (2 * np.pi * k**2)
        * (2 * k - 1 + (1 - k) / (2 * k) * speed2)
    )
    return Distribution(grid, values)


@pytest.fixture(scope="module")
def initial():
    return two_bump([0.3, 0.25], GRID)


def test_bgk_endpoints(initial):
    """Test that BGK returns f0 at t=0 and the Maxwellian at large t."""
    rate = RelaxationRate(1.0, 1.0)
    np.testing.assert_array_equal(solve_hom_bgk(initial, rate, 0.0).values, initial.values)

    equilibrium = maxwellian(moments(initial), GRID).values
    np.testing.assert_allclose(solve_hom_bgk(initial, rate, 1e3).values, equilibrium)
    with pytest.raises(InvalidInputError):
        solve_hom_bgk(initial, rate, -1.0)


def test_bgk_trajectory_matches_pointwise_solution(initial):
    """Test the trajectory form against single-time evaluations."""
    rate = RelaxationRate(0.5, 0.2)
    times = np.array([0.0, 0.1, 0.5, 2.0])
    trajectory = hom_bgk_trajectory(initial, rate, times)
    for t, row in zip(times, trajectory.values):
        np.testing.assert_allclose(row, solve_hom_bgk(initial, rate, t).values, atol=1e-14)


def test_bgk_preserves_moments_and_decreases_entropy(initial):
    """Test moment conservation and entropy decay of BGK relaxation."""
    rate = RelaxationRate(1.0, 1.0)
    trajectory = hom_bgk_trajectory(initial, rate, np.linspace(0, 3, 7))
    invariants = conserved_quantities(Distribution(GRID, trajectory.values))
    np.testing.assert_allclose(
        invariants, np.broadcast_to(invariants[0], invariants.shape), atol=1e-8
    )
    entropies = [entropy(state) for state in trajectory.states]
    assert np.all(np.diff(entropies) <= 1e-12)


def test_trajectory_rejects_unordered_times():
    """Test the strictly increasing time axis."""
    with pytest.raises(InvalidInputError):
        HomTrajectory(np.array([0.0, 0.0]), GRID, np.zeros((2, *GRID.shape)))


def test_boltzmann_rejects_unstable_step(initial):
    """Test the explicit stability bound on the time step."""
    plan = build_spectral_plan(GRID)
    with pytest.raises(ConfigurationError):
        solve_hom_boltzmann(initial, 0.1, 1.0, 1.0, plan)


def test_boltzmann_default_step_and_output_times():
    """Test default output times and conservation of the integrator."""
    initial = two_bump([0.3, 0.25], FINE_GRID)
    plan = build_spectral_plan(FINE_GRID)
    trajectory = solve_hom_boltzmann(initial, 1.0, 0.5, None, plan)
    np.testing.assert_allclose(trajectory.times, [0.0, 0.5])
    np.testing.assert_array_equal(trajectory.values[0], initial.values)

    before = conserved_quantities(initial)
    after = conserved_quantities(trajectory.final())
    assert after[0] == pytest.approx(before[0], rel=1e-8)
    np.testing.assert_allclose(after, before, atol=1e-5)
    assert entropy(trajectory.final()) < entropy(initial)


def test_boltzmann_reproduces_bkw():
    """Test the integrator against the exact BKW solution."""
    grid = FINE_GRID
    plan = build_spectral_plan(grid)
    times = np.array([0.0, 1.0, 2.0])
    trajectory = solve_hom_boltzmann(
        bkw(grid, 0.0), 1.0, 2.0, 0.01, plan, output_times=times
    )
    for t, state in zip(times, trajectory.states):
        exact = bkw(grid, t)
        error = np.sum(np.abs(state.values - exact.values)) * grid.cell_area
        assert error < 1e-3


def test_boltzmann_entropy_is_nonincreasing():
    """Test the discrete H-theorem along a Boltzmann trajectory."""
    initial = two_bump([-0.6, 0.7], FINE_GRID)
    plan = build_spectral_plan(FINE_GRID)
    trajectory = solve_hom_boltzmann(
        initial, 1.0, 0.5, None, plan, output_times=np.linspace(0.0, 0.5, 6)
    )
    entropies = np.array([entropy(state) for state in trajectory.states])
    assert np.all(np.diff(entropies) <= 1e-8)


@pytest.mark.parametrize("z", [[0.0, 0.0], [0.8, 0.9]])
def test_boltzmann_two_bump_on_desk_grid(z):
    """Test a two-bump run on the 32-point desk grid through its spectral tails."""
    grid = VelocityGrid(10.0, 32)
    initial = two_bump(z, grid)
    trajectory = solve_hom_boltzmann(
        initial, 1.0, 2.0, 0.05, build_spectral_plan(grid),
        output_times=np.linspace(0.0, 2.0, 5),
    )
    final = trajectory.final()
    assert np.all(np.isfinite(final.values))
    assert final.values.min() >= -1e-2 * final.values.max()

    before = conserved_quantities(initial)
    after = conserved_quantities(final)
    assert after[0] == pytest.approx(before[0], rel=1e-6)
    assert after[3] == pytest.approx(before[3], rel=1e-2)

    equilibrium = maxwellian(moments(initial), grid).values
    distances = [np.sum(np.abs(row - equilibrium)) for row in trajectory.values]
    assert distances[-1] < distances[0]
    assert entropy(final) < entropy(initial)
