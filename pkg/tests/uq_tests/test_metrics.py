"""Test expectation error metrics."""

import numpy as np
import pytest

from src.kinetic_uq.errors import GridMismatchError, InvalidInputError
from src.kinetic_uq.grid import Distribution, SpatialGrid, VelocityGrid
from src.kinetic_uq.uq import field_l1_error, l1_expectation_error, l2_relative_error


GRID = VelocityGrid(2.0, 8)


def test_l1_error_of_constant_offset():
    """Test the unweighted L1 error of a constant shift."""
    reference = Distribution(GRID, np.ones(GRID.shape))
    estimate = reference.with_values(reference.values + 0.25)
    assert l1_expectation_error(estimate, reference) == pytest.approx(0.25 * 16.0)
    assert l1_expectation_error(reference, reference, s=2.0) == 0.0


def test_weighted_error_grows_with_exponent():
    """Test that the velocity weight increases the error."""
    reference = Distribution(GRID, np.zeros(GRID.shape))
    estimate = reference.with_values(np.ones(GRID.shape))
    assert l1_expectation_error(estimate, reference, 1.0) > l1_expectation_error(
        estimate, reference, 0.0
    )


def test_l2_relative_error():
    """Test relative and zero-reference L2 errors."""
    reference = Distribution(GRID, np.full(GRID.shape, 2.0))
    estimate = reference.with_values(np.full(GRID.shape, 2.2))
    assert l2_relative_error(estimate, reference) == pytest.approx(0.1)
    zero = reference.with_values(np.zeros(GRID.shape))
    assert l2_relative_error(estimate, zero) == pytest.approx(2.2 * 4.0)


def test_grid_mismatch():
    """Test that errors between different grids are refused."""
    first = Distribution(GRID, np.ones(GRID.shape))
    second = Distribution(VelocityGrid(3.0, 8), np.ones(GRID.shape))
    with pytest.raises(GridMismatchError):
        l1_expectation_error(first, second)


def test_field_l1_error_per_quantity():
    """Test the midpoint L1 error of macroscopic profiles."""
    spatial = SpatialGrid(4)
    reference = np.zeros((3, 4))
    estimate = np.array([[1.0] * 4, [0.0, 0.0, 2.0, 2.0], [0.0] * 4])
    np.testing.assert_allclose(field_l1_error(estimate, reference, spatial), [1.0, 1.0, 0.0])
    assert field_l1_error(estimate[0], reference[0], spatial) == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        field_l1_error(estimate, np.zeros((3, 5)), spatial)
