"""Velocity and space grids, Maxwellians, moments, entropy and weighted norms.

Every array of distribution values keeps the velocity axes last: a
homogeneous distribution has shape ``(n, n)``, a field over a spatial grid has
shape ``(n_cells, n, n)`` and batched evaluations may add leading axes.
The first velocity axis is ``v_x`` and the second ``v_y``.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConfigurationError, DegenerateStateError, InvalidInputError


logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

GAS_CONSTANT = 1.0
VELOCITY_DIM = 2
ENTROPY_FLOOR = 1e-300
SPECTRAL_NEGATIVE_TOLERANCE = 1e-4
UNSTABLE_NEGATIVE_FRACTION = 1e-2
COVERAGE_WIDTHS = 6.0


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform midpoint lattice over ``[-extent, extent]^2``.

    Parameters
    ----------
    extent
        Half-width ``V_max`` of the velocity box.
    n_per_dim
        Points per dimension; even and at least 4.
    """

    extent: float
    n_per_dim: int

    def __post_init__(self) -> None:
        if not np.isfinite(self.extent) or self.extent <= 0:
            raise ConfigurationError(f"extent must be positive, got {self.extent}")
        if self.n_per_dim < 4 or self.n_per_dim % 2:
            raise ConfigurationError(
                f"n_per_dim must be even and >= 4, got {self.n_per_dim}"
            )

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.n_per_dim

    @property
    def cell_area(self) -> float:
        return self.spacing**2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_per_dim, self.n_per_dim)

    @property
    def n_nodes(self) -> int:
        return self.n_per_dim**2

    @cached_property
    def axis(self) -> FloatArray:
        """Node coordinates along one dimension."""
        return -self.extent + (np.arange(self.n_per_dim) + 0.5) * self.spacing

    @cached_property
    def nodes(self) -> FloatArray:
        """Node coordinates, shape ``(n, n, 2)``."""
        vx, vy = np.meshgrid(self.axis, self.axis, indexing="ij")
        return np.stack([vx, vy], axis=-1)

    @property
    def vx(self) -> FloatArray:
        return self.nodes[..., 0]

    @property
    def vy(self) -> FloatArray:
        return self.nodes[..., 1]

    @cached_property
    def speed_squared(self) -> FloatArray:
        return self.vx**2 + self.vy**2


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform cells on the unit interval."""

    n_cells: int

    def __post_init__(self) -> None:
        if self.n_cells < 1:
            raise ConfigurationError(f"n_cells must be positive, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return 1.0 / self.n_cells

    @cached_property
    def centers(self) -> FloatArray:
        return (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass(frozen=True, eq=False)
class Distribution:
    """Density values on a velocity grid, optionally over a spatial grid.

    Values are finite; nonnegativity is a property of solver outputs, not of
    every distribution (collision operator outputs change sign).
    """

    grid: VelocityGrid
    values: FloatArray
    spatial: SpatialGrid | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim < 2 or values.shape[-2:] != self.grid.shape:
            raise InvalidInputError(
                f"values shape {values.shape} does not end with {self.grid.shape}"
            )
        if self.spatial is not None and (
            values.ndim != 3 or values.shape[0] != self.spatial.n_cells
        ):
            raise InvalidInputError(
                f"field values shape {values.shape} does not match "
                f"{self.spatial.n_cells} cells"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("distribution values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def is_field(self) -> bool:
        return self.spatial is not None

    def with_values(self, values: ArrayLike) -> "Distribution":
        """Return a distribution on the same grids with new values."""
        return Distribution(self.grid, np.asarray(values), self.spatial)


@dataclass(frozen=True, eq=False)
class MacroState:
    """Density, bulk velocity and temperature, possibly per cell.

    ``rho`` and ``temp`` have a common batch shape, ``u`` has that shape plus a
    trailing axis of length 2.
    """

    rho: FloatArray
    u: FloatArray
    temp: FloatArray

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=np.float64)
        u = np.asarray(self.u, dtype=np.float64)
        temp = np.asarray(self.temp, dtype=np.float64)

        if u.shape[-1:] != (VELOCITY_DIM,) or u.shape[:-1] != rho.shape:
            raise InvalidInputError(
                f"u shape {u.shape} is incompatible with rho shape {rho.shape}"
            )
        if temp.shape != rho.shape:
            raise InvalidInputError(
                f"temp shape {temp.shape} differs from rho shape {rho.shape}"
            )
        if not (
            np.all(np.isfinite(rho))
            and np.all(np.isfinite(u))
            and np.all(np.isfinite(temp))
        ):
            raise InvalidInputError("macroscopic state has non-finite entries")
        if np.any(rho <= 0):
            raise DegenerateStateError("density must be positive")
        if np.any(temp <= 0):
            raise DegenerateStateError("temperature must be positive")

        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "temp", temp)

    @property
    def energy(self) -> FloatArray:
        """Total energy density ``rho (|u|^2 + d_v R T) / 2``."""
        speed2 = np.sum(self.u**2, axis=-1)
        return 0.5 * self.rho * (speed2 + VELOCITY_DIM * GAS_CONSTANT * self.temp)

    @property
    def pressure(self) -> FloatArray:
        return self.rho * GAS_CONSTANT * self.temp

    @property
    def momentum(self) -> FloatArray:
        return self.rho[..., None] * self.u

    def conserved(self) -> FloatArray:
        """Stack ``(rho, rho u_x, rho u_y, E)`` along a trailing axis."""
        return np.concatenate(
            [self.rho[..., None], self.momentum, self.energy[..., None]], axis=-1
        )

    @classmethod
    def from_conserved(cls, conserved: ArrayLike) -> "MacroState":
        """Build from ``(rho, rho u_x, rho u_y, E)`` along the last axis."""
        conserved = np.asarray(conserved, dtype=np.float64)
        rho = conserved[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = conserved[..., 1:3] / rho[..., None]
            internal = conserved[..., 3] - 0.5 * rho * np.sum(u**2, axis=-1)
            temp = internal / (rho * GAS_CONSTANT * VELOCITY_DIM / 2.0)
        return cls(rho=rho, u=u, temp=temp)


def _check_coverage(state: MacroState, grid: VelocityGrid) -> None:
    reach = np.abs(state.u) + COVERAGE_WIDTHS * np.sqrt(state.temp)[..., None]
    if np.any(reach > grid.extent):
        logger.warning(
            "Velocity box of half-width %.3g does not cover %.0f thermal widths "
            "(needs %.3g); Maxwellian tails are truncated.",
            grid.extent,
            COVERAGE_WIDTHS,
            float(np.max(reach)),
        )


def maxwellian(
    state: MacroState,
    grid: VelocityGrid,
    spatial: SpatialGrid | None = None,
) -> Distribution:
    """Evaluate ``rho/(2 pi R T) exp(-|v-u|^2 / (2 R T))`` on the grid nodes.

    Parameters
    ----------
    state
        Macroscopic state; batched states yield one Maxwellian per entry.
    grid
        Velocity grid.
    spatial
        Spatial grid when ``state`` holds one entry per cell.

    Returns
    -------
    Distribution
        Values of shape ``state.rho.shape + grid.shape``.
    """
    _check_coverage(state, grid)
    rt = GAS_CONSTANT * state.temp[..., None, None]
    dvx = grid.vx - state.u[..., 0, None, None]
    dvy = grid.vy - state.u[..., 1, None, None]
    values = (
        state.rho[..., None, None]
        / (2.0 * np.pi * rt)
        * np.exp(-(dvx**2 + dvy**2) / (2.0 * rt))
    )
    return Distribution(grid, values, spatial)


def _velocity_integral(values: FloatArray, grid: VelocityGrid) -> FloatArray:
    return np.sum(values, axis=(-2, -1)) * grid.cell_area


def conserved_quantities(f: Distribution) -> FloatArray:
    """Return discrete ``(mass, momentum_x, momentum_y, energy)`` per state.

    Energy is ``int f |v|^2 / 2``. The result has the batch shape of ``f``
    plus a trailing axis of length 4.
    """
    grid = f.grid
    return np.stack(
        [
            _velocity_integral(f.values, grid),
            _velocity_integral(f.values * grid.vx, grid),
            _velocity_integral(f.values * grid.vy, grid),
            _velocity_integral(0.5 * f.values * grid.speed_squared, grid),
        ],
        axis=-1,
    )


def moments(f: Distribution) -> MacroState:
    """Midpoint-rule density, bulk velocity and temperature of ``f``."""
    grid = f.grid
    mass = _velocity_integral(f.values, grid)
    if np.any(mass <= 0):
        raise DegenerateStateError(
            f"discrete mass must be positive, got min {float(np.min(mass)):.3e}"
        )

    u = np.stack(
        [
            _velocity_integral(f.values * grid.vx, grid) / mass,
            _velocity_integral(f.values * grid.vy, grid) / mass,
        ],
        axis=-1,
    )
    peculiar = (grid.vx - u[..., 0, None, None]) ** 2 + (
        grid.vy - u[..., 1, None, None]
    ) ** 2
    temp = _velocity_integral(f.values * peculiar, grid) / (
        VELOCITY_DIM * GAS_CONSTANT * mass
    )
    return MacroState(rho=mass, u=u, temp=temp)


def check_negatives(values: FloatArray, what: str = "distribution") -> None:
    """Reject unstable values and log spectral tails beyond the tolerance.

    Parameters
    ----------
    values
        Distribution values of any shape.
    what
        Label used in log and error messages.

    Raises
    ------
    InvalidInputError
        If any entry is non-finite or lies below
        ``-UNSTABLE_NEGATIVE_FRACTION * max(|values|)``.

    Notes
    -----
    Negatives down to ``-SPECTRAL_NEGATIVE_TOLERANCE * max(|values|)`` are
    truncation error of the spectral collision operator and pass silently.
    Deeper ones are logged once per label through the repeated-warning filter.
    """
    if not np.all(np.isfinite(values)):
        raise InvalidInputError(f"{what} has non-finite entries")
    if not values.size:
        return
    scale = float(np.max(np.abs(values)))
    lowest = float(np.min(values))
    if lowest < -UNSTABLE_NEGATIVE_FRACTION * scale:
        raise InvalidInputError(
            f"{what} has negative entries down to {lowest:.3e} "
            f"(max magnitude {scale:.3e})"
        )
    if lowest < -SPECTRAL_NEGATIVE_TOLERANCE * scale:
        logger.warning(
            "%s has negatives beyond %.0e of its maximum",
            what,
            SPECTRAL_NEGATIVE_TOLERANCE,
        )


def clip_negatives(values: FloatArray, what: str = "distribution") -> FloatArray:
    """``check_negatives``, then set every negative entry to zero."""
    check_negatives(values, what)
    return np.clip(values, 0.0, None)


def _integrate(f: Distribution, density: FloatArray) -> float | FloatArray:
    total = _velocity_integral(density, f.grid)
    if f.spatial is not None:
        total = np.sum(total, axis=0) * f.spatial.dx
    return float(total) if np.ndim(total) == 0 else total


def entropy(f: Distribution) -> float | FloatArray:
    """Quadrature of ``f log f`` with ``0 log 0 = 0``.

    Values below ``1e-300`` contribute zero. Fields are integrated over space
    as well.
    """
    values = clip_negatives(f.values)
    safe = np.where(values > ENTROPY_FLOOR, values, 1.0)
    density = np.where(values > ENTROPY_FLOOR, values * np.log(safe), 0.0)
    return _integrate(f, density)


def weighted_norm(f: Distribution, s: float, p: int) -> float | FloatArray:
    """``(int |f|^p (1+|v|)^s)^(1/p)``, summed over space for fields."""
    if p not in (1, 2):
        raise InvalidInputError(f"p must be 1 or 2, got {p}")
    if s < 0:
        raise InvalidInputError(f"s must be nonnegative, got {s}")

    weight = (1.0 + np.sqrt(f.grid.speed_squared)) ** s
    integral = _integrate(f, np.abs(f.values) ** p * weight)
    return integral ** (1.0 / p)
