"""Parametric initial-data families: the uncertain two-bump state and shock tubes."""

from typing import Literal

import numpy as np
import pydantic
from numpy.typing import ArrayLike

from .errors import DimensionMismatchError
from .grid import Distribution, FloatArray, MacroState, SpatialGrid, VelocityGrid
from .solvers import EulerField, KineticField, PrimitiveState
from .uq import RandomInputSpec


INTERFACE = 0.5


def _as_vector(z: ArrayLike, dim: int) -> FloatArray:
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if z.shape != (dim,):
        raise DimensionMismatchError(f"expected a {dim}-vector, got shape {z.shape}")
    return z


def bump_shift(z: ArrayLike) -> FloatArray:
    """``s(z) = z_1 (sin 2 pi z_2, cos 2 pi z_2)``."""
    z = _as_vector(z, 2)
    angle = 2.0 * np.pi * z[1]
    return z[0] * np.array([np.sin(angle), np.cos(angle)])


def two_bump(
    z: ArrayLike,
    grid: VelocityGrid,
    rho0: float = 0.75,
    sigma: float = 0.5,
    d: float = 1.5,
) -> Distribution:
    """Two Gaussian bumps centred at ``s(z) +- (d, d)``.

    Each bump is ``rho0 / (2 pi sigma) exp(-|v - c|^2 / sigma)``, so the state
    has mass ``rho0``, bulk velocity ``s(z)`` and temperature
    ``sigma / 2 + d^2``.
    """
    shift = bump_shift(z)
    values = np.zeros(grid.shape)
    for sign in (1.0, -1.0):
        center = shift + sign * d
        distance2 = (grid.vx - center[0]) ** 2 + (grid.vy - center[1]) ** 2
        values += rho0 / (2.0 * np.pi * sigma) * np.exp(-distance2 / sigma)
    return Distribution(grid, values)


class TwoBumpFamily(pydantic.BaseModel):
    """Two-bump relaxation problem with ``z in (-1, 1) x (0, 1)``."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    rho0: float = pydantic.Field(default=0.75, gt=0)
    sigma: float = pydantic.Field(default=0.5, gt=0)
    d: float = 1.5

    def random_input(self) -> RandomInputSpec:
        return RandomInputSpec(((-1.0, 1.0), (0.0, 1.0)))

    def initial(self, z: ArrayLike, grid: VelocityGrid) -> Distribution:
        return two_bump(z, grid, self.rho0, self.sigma, self.d)

    @property
    def temperature(self) -> float:
        return self.sigma / 2.0 + self.d**2


class RiemannSide(pydantic.BaseModel):
    """Affine-in-z density, normal velocity and temperature of one side.

    Each field is ``base + slope * z[component]``.
    """

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    rho: float
    u: float
    temp: float
    component: int = 0
    rho_slope: float = 0.0
    u_slope: float = 0.0
    temp_slope: float = 0.0

    def at(self, z: FloatArray) -> tuple[float, float, float]:
        value = float(z[self.component])
        return (
            self.rho + self.rho_slope * value,
            self.u + self.u_slope * value,
            self.temp + self.temp_slope * value,
        )


class RiemannFamily(pydantic.BaseModel):
    """Shock-tube initial data: local Maxwellians left and right of ``x = 0.5``."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    name: str
    left: RiemannSide
    right: RiemannSide
    dim: int = pydantic.Field(default=1, ge=1, le=2)

    def random_input(self) -> RandomInputSpec:
        return RandomInputSpec(tuple((-1.0, 1.0) for _ in range(self.dim)))

    def sides(self, z: ArrayLike) -> tuple[tuple[float, float, float], ...]:
        z = _as_vector(z, self.dim)
        return self.left.at(z), self.right.at(z)

    def macro(self, z: ArrayLike, spatial: SpatialGrid) -> MacroState:
        left, right = self.sides(z)
        is_left = spatial.centers < INTERFACE
        rho, u_x, temp = (
            np.where(is_left, lhs, rhs) for lhs, rhs in zip(left, right, strict=True)
        )
        u = np.stack([u_x, np.zeros_like(u_x)], axis=-1)
        return MacroState(rho=rho, u=u, temp=temp)

    def kinetic_init(
        self, z: ArrayLike, spatial: SpatialGrid, grid: VelocityGrid
    ) -> KineticField:
        return KineticField.from_macro(self.macro(z, spatial), spatial, grid)

    def euler_init(self, z: ArrayLike, spatial: SpatialGrid) -> EulerField:
        return EulerField.from_macro(self.macro(z, spatial), spatial)

    def primitive_states(self, z: ArrayLike) -> tuple[PrimitiveState, PrimitiveState]:
        """Exact-solver states, with pressure ``rho T``."""
        (rho_l, u_l, t_l), (rho_r, u_r, t_r) = self.sides(z)
        return PrimitiveState(rho_l, u_l, rho_l * t_l), PrimitiveState(
            rho_r, u_r, rho_r * t_r
        )


def sod_family() -> RiemannFamily:
    return RiemannFamily(
        name="sod",
        left=RiemannSide(rho=1.0, u=0.0, temp=1.0, temp_slope=0.25),
        right=RiemannSide(rho=0.125, u=0.0, temp=0.8, temp_slope=0.25),
    )


def lax_family() -> RiemannFamily:
    return RiemannFamily(
        name="lax",
        dim=2,
        left=RiemannSide(rho=0.445, u=0.698, temp=3.528, rho_slope=0.02),
        right=RiemannSide(rho=0.5, u=0.0, temp=0.571, component=1, temp_slope=0.02),
    )


def double_rarefaction_family() -> RiemannFamily:
    return RiemannFamily(
        name="double_rarefaction",
        dim=2,
        left=RiemannSide(rho=1.0, u=-2.0, temp=0.4, u_slope=0.05),
        right=RiemannSide(rho=1.0, u=2.0, temp=0.4, component=1, u_slope=0.05),
    )


RiemannName = Literal["sod", "lax", "double_rarefaction"]

RIEMANN_FAMILIES = {
    "sod": sod_family,
    "lax": lax_family,
    "double_rarefaction": double_rarefaction_family,
}


def riemann_family(name: RiemannName) -> RiemannFamily:
    return RIEMANN_FAMILIES[name]()
