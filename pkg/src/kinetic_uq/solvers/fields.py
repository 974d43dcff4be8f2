"""Kinetic and fluid fields over the 1D spatial grid, and their trajectories."""

from dataclasses import dataclass
from typing import Generic, TypeVar

import numpy as np

from ..errors import DegenerateStateError, InvalidInputError
from ..grid import (
    Distribution,
    FloatArray,
    MacroState,
    SpatialGrid,
    VelocityGrid,
    maxwellian,
    moments,
)


@dataclass(frozen=True, eq=False)
class KineticField:
    """Distribution values indexed ``(cell, v_x node, v_y node)``."""

    spatial: SpatialGrid
    grid: VelocityGrid
    values: FloatArray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.spatial.n_cells, *self.grid.shape):
            raise InvalidInputError(
                f"field shape {values.shape} does not match "
                f"({self.spatial.n_cells}, {self.grid.n_per_dim}, "
                f"{self.grid.n_per_dim})"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("kinetic field values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def distribution(self) -> Distribution:
        return Distribution(self.grid, self.values, self.spatial)

    def macro(self) -> MacroState:
        """Per-cell moments."""
        return moments(self.distribution)

    def with_values(self, values: FloatArray) -> "KineticField":
        return KineticField(self.spatial, self.grid, values)

    @classmethod
    def from_macro(
        cls, state: MacroState, spatial: SpatialGrid, grid: VelocityGrid
    ) -> "KineticField":
        """Local Maxwellian field of a per-cell state."""
        return cls(spatial, grid, maxwellian(state, grid, spatial).values)


@dataclass(frozen=True, eq=False)
class EulerField:
    """Per-cell conservative variables ``(rho, rho u_x, rho u_y, E)``."""

    spatial: SpatialGrid
    conserved: FloatArray

    def __post_init__(self) -> None:
        conserved = np.asarray(self.conserved, dtype=np.float64)
        if conserved.shape != (self.spatial.n_cells, 4):
            raise InvalidInputError(
                f"conserved shape {conserved.shape} is not "
                f"({self.spatial.n_cells}, 4)"
            )
        if not np.all(np.isfinite(conserved)):
            raise InvalidInputError("Euler state has non-finite entries")
        rho = conserved[:, 0]
        if np.any(rho <= 0):
            raise DegenerateStateError("Euler density must be positive")
        kinetic = 0.5 * np.sum(conserved[:, 1:3] ** 2, axis=1) / rho
        if np.any(conserved[:, 3] <= kinetic):
            raise DegenerateStateError("Euler internal energy must be positive")
        object.__setattr__(self, "conserved", conserved)

    def macro(self) -> MacroState:
        return MacroState.from_conserved(self.conserved)

    @classmethod
    def from_macro(cls, state: MacroState, spatial: SpatialGrid) -> "EulerField":
        return cls(spatial, state.conserved())


FieldT = TypeVar("FieldT", KineticField, EulerField)


@dataclass(frozen=True, eq=False)
class FieldTrajectory(Generic[FieldT]):
    """Fields at output times plus the cumulative boundary outflow.

    ``boundary_flux[k]`` is the net amount of ``(mass, momentum_x,
    momentum_y, energy)`` that left the domain between ``times[0]`` and
    ``times[k]``.
    """

    times: FloatArray
    fields: list[FieldT]
    boundary_flux: FloatArray

    def final(self) -> FieldT:
        return self.fields[-1]

    def macro_array(self) -> FloatArray:
        """Stack ``(rho, u_x, temp)`` per time, shape ``(n_times, 3, n_cells)``."""
        rows = []
        for item in self.fields:
            state = item.macro()
            rows.append(np.stack([state.rho, state.u[:, 0], state.temp]))
        return np.stack(rows)
