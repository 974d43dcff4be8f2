"""Test the Euler finite-volume solver and the exact Riemann solver."""

import numpy as np
import pytest

from src.kinetic_uq.errors import DegenerateStateError, InvalidInputError, VacuumWarning
from src.kinetic_uq.grid import MacroState, SpatialGrid
from src.kinetic_uq.initial_data import riemann_family
from src.kinetic_uq.solvers import (
    EulerField,
    PrimitiveState,
    euler_1d_trajectory,
    exact_riemann,
    solve_euler_1d,
)
from src.kinetic_uq.solvers.euler_1d import _apply_floor, conservative, primitive
from src.kinetic_uq.solvers.riemann import generates_vacuum, star_region


def test_star_region_of_classical_sod():
    """Test the star state of the classical gamma = 1.4 Sod problem."""
    star = star_region(PrimitiveState(1.0, 0.0, 1.0), PrimitiveState(0.125, 0.0, 0.1), 1.4)
    assert star.pressure == pytest.approx(0.30313, abs=1e-5)
    assert star.velocity == pytest.approx(0.92745, abs=1e-5)


def test_exact_solution_far_field_and_symmetry():
    """Test untouched far-field states and a symmetric double rarefaction."""
    left, right = PrimitiveState(1.0, -0.5, 0.4), PrimitiveState(1.0, 0.5, 0.4)
    x = np.linspace(0.0, 1.0, 101)
    rho, u, p = exact_riemann(left, right, x, 0.1)
    assert rho[0] == pytest.approx(1.0) and u[0] == pytest.approx(-0.5)
    assert p[-1] == pytest.approx(0.4)
    np.testing.assert_allclose(rho, rho[::-1], atol=1e-10)
    np.testing.assert_allclose(u, -u[::-1], atol=1e-10)
    assert rho[50] < 1.0


def test_vacuum_generation():
    """Test the vacuum criterion and the zero-density middle state."""
    left, right = PrimitiveState(1.0, -5.0, 0.4), PrimitiveState(1.0, 5.0, 0.4)
    assert generates_vacuum(left, right, 2.0)
    rho, u, p = exact_riemann(left, right, np.array([0.5]), 0.05)
    assert rho[0] == 0.0 and p[0] == 0.0


def test_primitive_state_validation():
    """Test that nonpositive density or pressure is rejected."""
    with pytest.raises(DegenerateStateError):
        PrimitiveState(0.0, 0.0, 1.0)


def test_primitive_conservative_inverse():
    """Test that the variable maps are mutual inverses."""
    prim = np.array([[1.0, 0.3, -0.2, 0.7], [0.2, -1.0, 0.0, 0.05]])
    np.testing.assert_allclose(primitive(conservative(prim)), prim)


def test_euler_field_validation():
    """Test rejection of misshaped and degenerate Euler states."""
    spatial = SpatialGrid(2)
    with pytest.raises(InvalidInputError):
        EulerField(spatial, np.ones((3, 4)))
    with pytest.raises(DegenerateStateError):
        EulerField(spatial, np.array([[1.0, 0.0, 0.0, 1.0], [-1.0, 0.0, 0.0, 1.0]]))


def test_uniform_flow_is_stationary():
    """Test that a uniform state stays uniform."""
    spatial = SpatialGrid(16)
    state = MacroState(np.full(16, 0.5), np.tile([0.4, 0.1], (16, 1)), np.full(16, 0.9))
    init = EulerField.from_macro(state, spatial)
    final = solve_euler_1d(init, 0.2)
    np.testing.assert_allclose(final.conserved, init.conserved, rtol=1e-12)


def test_conservation_with_boundary_flux():
    """Test that domain totals plus outflow equal the initial totals."""
    spatial = SpatialGrid(80)
    init = riemann_family("lax").euler_init([0.3, -0.4], spatial)
    trajectory = euler_1d_trajectory(init, [0.05, 0.1])
    initial = init.conserved.sum(axis=0) * spatial.dx
    for field, flux in zip(trajectory.fields, trajectory.boundary_flux):
        np.testing.assert_allclose(
            field.conserved.sum(axis=0) * spatial.dx + flux, initial, atol=1e-12
        )
    np.testing.assert_allclose(trajectory.times, [0.05, 0.1])


@pytest.mark.parametrize("name", ["sod", "lax", "double_rarefaction"])
def test_euler_converges_to_exact_solution(name):
    """Test the finite-volume density against the exact Riemann profile."""
    family = riemann_family(name)
    z = np.zeros(family.dim)
    spatial = SpatialGrid(200)
    t_final = 0.1
    rho = euler_1d_trajectory(family.euler_init(z, spatial), [t_final]).macro_array()[-1, 0]
    left, right = family.primitive_states(z)
    exact_rho, _, _ = exact_riemann(left, right, spatial.centers, t_final)
    assert np.mean(np.abs(rho - exact_rho)) < 3e-2


def test_vacuum_floor_warns():
    """Test that flooring a near-vacuum cell issues a warning."""
    conserved = np.array([[1.0, 0.0, 0.0, 1.0], [1e-12, 0.0, 0.0, 1e-13]])
    with pytest.warns(VacuumWarning):
        floored = _apply_floor(conserved)
    assert floored[1, 0] >= 1e-10
    np.testing.assert_array_equal(floored[0], conserved[0])
