"""Test the entropy discrepancy and the BGK frequency calibration."""

import numpy as np
import pytest

from src.kinetic_uq.calibration import (
    CalibrationProblem,
    build_bgk_reference,
    build_boltzmann_reference,
    calibrate_mu,
    entropy_discrepancy,
    sensitivity_sweep,
    sweep_discrepancy,
)
from src.kinetic_uq.errors import (
    CalibrationBracketError,
    ConfigurationError,
    InvalidInputError,
)
from src.kinetic_uq.grid import VelocityGrid
from src.kinetic_uq.initial_data import two_bump


GRID = VelocityGrid(12.0, 48)


@pytest.fixture(scope="module")
def initial_states():
    return [two_bump([0.0, 0.5], GRID), two_bump([0.6, 0.2], GRID)]


@pytest.fixture(scope="module")
def bgk_problem(initial_states):
    return build_bgk_reference(initial_states, eps=1.0, horizon=2.0, mu=0.2)


def test_discrepancy_vanishes_at_reference_rate(bgk_problem):
    """Test that ``J`` is zero at the generating rate and positive elsewhere."""
    assert entropy_discrepancy(0.2, bgk_problem) == pytest.approx(0.0, abs=1e-14)
    assert entropy_discrepancy(0.1, bgk_problem) > 0
    assert entropy_discrepancy(0.4, bgk_problem) > 0
    with pytest.raises(InvalidInputError):
        entropy_discrepancy(-1.0, bgk_problem)


def test_calibration_recovers_generating_rate(bgk_problem):
    """Test golden-section recovery of a known BGK rate."""
    result = calibrate_mu(bgk_problem, (0.05, 0.5), rel_tol=1e-4)
    assert result.mu_star == pytest.approx(0.2, rel=1e-2)
    assert result.inverse == pytest.approx(1.0 / result.mu_star)
    assert len(result.probes) > 3
    assert result.discrepancy <= min(value for _, value in result.probes[:3])


def test_calibration_without_interior_minimum(initial_states):
    """Test the bracket diagnostic when the minimum lies outside."""
    problem = build_bgk_reference(initial_states, eps=1.0, horizon=2.0, mu=1.0)
    with pytest.raises(CalibrationBracketError) as info:
        calibrate_mu(problem, (0.05, 0.5))
    assert len(info.value.probes) == 3
    assert "No interior minimum" in str(info.value)


def test_invalid_bracket(bgk_problem):
    """Test rejection of an empty or nonpositive bracket."""
    with pytest.raises(ConfigurationError):
        calibrate_mu(bgk_problem, (0.5, 0.05))
    with pytest.raises(ConfigurationError):
        calibrate_mu(bgk_problem, (0.0, 0.5))


def test_sweep_keeps_input_order(bgk_problem):
    """Test the discrepancy sweep with threads."""
    mus = [0.4, 0.1, 0.2, 0.3]
    sweep = sweep_discrepancy(bgk_problem, mus, jobs=2)
    assert [mu for mu, _ in sweep] == mus
    assert min(sweep, key=lambda item: item[1])[0] == 0.2


def test_problem_validation(initial_states, bgk_problem):
    """Test the reference-curve checks of a calibration problem."""
    with pytest.raises(InvalidInputError):
        CalibrationProblem(tuple(initial_states), 1.0, 2.0, np.zeros((2, 10)))
    increasing = np.tile(np.linspace(0.0, 1.0, 50), (2, 1))
    with pytest.raises(InvalidInputError):
        CalibrationProblem(tuple(initial_states), 1.0, 2.0, increasing)
    with pytest.raises(ConfigurationError):
        CalibrationProblem((), 1.0, 2.0, np.zeros((0, 50)))
    np.testing.assert_allclose(bgk_problem.times[[0, -1]], [0.0, 2.0])


@pytest.mark.integration_test
def test_boltzmann_calibration_of_nominal_two_bump():
    """Test that the calibrated inverse rate of the nominal state is moderate."""
    grid = VelocityGrid(10.0, 64)
    problem = build_boltzmann_reference([two_bump([0.0, 0.5], grid)], 1.0, 2.0)
    result = calibrate_mu(problem)
    assert 4.0 <= result.inverse <= 9.0


@pytest.mark.integration_test
def test_sensitivity_sweep_follows_density():
    """Test that denser states relax faster and calibrate to larger rates."""
    frame = sensitivity_sweep([0.5], [1.5], [0.75, 1.5], VelocityGrid(10.0, 64))
    assert list(frame.columns) == [
        "sigma",
        "d",
        "rho0",
        "mu_star",
        "inv_mu_star",
        "discrepancy",
    ]
    assert frame["mu_star"].iloc[1] > frame["mu_star"].iloc[0]
