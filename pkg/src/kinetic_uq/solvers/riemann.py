"""Exact Riemann solver for the 1D gamma-law Euler equations.

Used as the reference for shock-tube profiles. Follows the classical
two-rarefaction/two-shock pressure-function construction; the star pressure
is the root of a monotone function bracketed between zero and a pressure
where it turns positive.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize

from ..errors import DegenerateStateError
from ..grid import FloatArray
from .euler_1d import GAMMA


@dataclass(frozen=True, slots=True)
class PrimitiveState:
    """Density, normal velocity and pressure on one side of the interface."""

    rho: float
    u: float
    p: float

    def __post_init__(self) -> None:
        if self.rho <= 0 or self.p <= 0:
            raise DegenerateStateError(
                f"Riemann states need positive density and pressure: {self}"
            )

    def sound_speed(self, gamma: float) -> float:
        return math.sqrt(gamma * self.p / self.rho)


@dataclass(frozen=True, slots=True)
class StarRegion:
    pressure: float
    velocity: float


def _pressure_function(p: float, side: PrimitiveState, gamma: float) -> float:
    if p > side.p:
        a_coeff = 2.0 / ((gamma + 1.0) * side.rho)
        b_coeff = (gamma - 1.0) / (gamma + 1.0) * side.p
        return (p - side.p) * math.sqrt(a_coeff / (p + b_coeff))
    sound = side.sound_speed(gamma)
    return 2.0 * sound / (gamma - 1.0) * ((p / side.p) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)


def generates_vacuum(left: PrimitiveState, right: PrimitiveState, gamma: float) -> bool:
    """Pressure positivity condition of the exact solution."""
    return 2.0 * (left.sound_speed(gamma) + right.sound_speed(gamma)) / (
        gamma - 1.0
    ) <= (right.u - left.u)


def star_region(
    left: PrimitiveState, right: PrimitiveState, gamma: float = GAMMA
) -> StarRegion:
    """Star pressure and contact velocity (no vacuum generation)."""

    def _residual(p: float) -> float:
        return (
            _pressure_function(p, left, gamma)
            + _pressure_function(p, right, gamma)
            + right.u
            - left.u
        )

    low = 1e-14 * max(left.p, right.p)
    high = max(left.p, right.p)
    while _residual(high) < 0:
        high *= 2.0
    pressure = optimize.brentq(_residual, low, high, xtol=1e-14, rtol=1e-13)
    velocity = 0.5 * (left.u + right.u) + 0.5 * (
        _pressure_function(pressure, right, gamma)
        - _pressure_function(pressure, left, gamma)
    )
    return StarRegion(pressure, velocity)


def _left_fan(side: PrimitiveState, speed: float, gamma: float) -> tuple[float, float, float]:
    sound = side.sound_speed(gamma)
    c = 2.0 / (gamma + 1.0) + (gamma - 1.0) / ((gamma + 1.0) * sound) * (side.u - speed)
    return (
        side.rho * c ** (2.0 / (gamma - 1.0)),
        2.0 / (gamma + 1.0) * (sound + 0.5 * (gamma - 1.0) * side.u + speed),
        side.p * c ** (2.0 * gamma / (gamma - 1.0)),
    )


def _right_fan(side: PrimitiveState, speed: float, gamma: float) -> tuple[float, float, float]:
    sound = side.sound_speed(gamma)
    c = 2.0 / (gamma + 1.0) - (gamma - 1.0) / ((gamma + 1.0) * sound) * (side.u - speed)
    return (
        side.rho * c ** (2.0 / (gamma - 1.0)),
        2.0 / (gamma + 1.0) * (-sound + 0.5 * (gamma - 1.0) * side.u + speed),
        side.p * c ** (2.0 * gamma / (gamma - 1.0)),
    )


def _sample_left(
    side: PrimitiveState, star: StarRegion, speed: float, gamma: float
) -> tuple[float, float, float]:
    ratio = star.pressure / side.p
    sound = side.sound_speed(gamma)
    g6 = (gamma - 1.0) / (gamma + 1.0)
    if star.pressure > side.p:
        shock = side.u - sound * math.sqrt(
            (gamma + 1.0) / (2.0 * gamma) * ratio + (gamma - 1.0) / (2.0 * gamma)
        )
        if speed <= shock:
            return side.rho, side.u, side.p
        return side.rho * (ratio + g6) / (g6 * ratio + 1.0), star.velocity, star.pressure

    if speed <= side.u - sound:
        return side.rho, side.u, side.p
    tail = star.velocity - sound * ratio ** ((gamma - 1.0) / (2.0 * gamma))
    if speed > tail:
        return side.rho * ratio ** (1.0 / gamma), star.velocity, star.pressure
    return _left_fan(side, speed, gamma)


def _sample_right(
    side: PrimitiveState, star: StarRegion, speed: float, gamma: float
) -> tuple[float, float, float]:
    ratio = star.pressure / side.p
    sound = side.sound_speed(gamma)
    g6 = (gamma - 1.0) / (gamma + 1.0)
    if star.pressure > side.p:
        shock = side.u + sound * math.sqrt(
            (gamma + 1.0) / (2.0 * gamma) * ratio + (gamma - 1.0) / (2.0 * gamma)
        )
        if speed >= shock:
            return side.rho, side.u, side.p
        return side.rho * (ratio + g6) / (g6 * ratio + 1.0), star.velocity, star.pressure

    if speed >= side.u + sound:
        return side.rho, side.u, side.p
    tail = star.velocity + sound * ratio ** ((gamma - 1.0) / (2.0 * gamma))
    if speed <= tail:
        return side.rho * ratio ** (1.0 / gamma), star.velocity, star.pressure
    return _right_fan(side, speed, gamma)


def _sample_vacuum(
    left: PrimitiveState, right: PrimitiveState, speed: float, gamma: float
) -> tuple[float, float, float]:
    left_front = left.u + 2.0 * left.sound_speed(gamma) / (gamma - 1.0)
    right_front = right.u - 2.0 * right.sound_speed(gamma) / (gamma - 1.0)
    if speed <= left_front:
        if speed <= left.u - left.sound_speed(gamma):
            return left.rho, left.u, left.p
        return _left_fan(left, speed, gamma)
    if speed >= right_front:
        if speed >= right.u + right.sound_speed(gamma):
            return right.rho, right.u, right.p
        return _right_fan(right, speed, gamma)
    return 0.0, 0.0, 0.0


def exact_riemann(
    left: PrimitiveState,
    right: PrimitiveState,
    x: ArrayLike,
    t: float,
    x0: float = 0.5,
    gamma: float = GAMMA,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Sample the exact solution at positions ``x`` and time ``t > 0``.

    Returns
    -------
    tuple
        Density, velocity and pressure arrays shaped like ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    speeds = (x - x0) / t
    samples = np.empty((*x.shape, 3))

    if generates_vacuum(left, right, gamma):
        for index, speed in np.ndenumerate(speeds):
            samples[index] = _sample_vacuum(left, right, float(speed), gamma)
    else:
        star = star_region(left, right, gamma)
        for index, speed in np.ndenumerate(speeds):
            if speed <= star.velocity:
                samples[index] = _sample_left(left, star, float(speed), gamma)
            else:
                samples[index] = _sample_right(right, star, float(speed), gamma)

    return samples[..., 0], samples[..., 1], samples[..., 2]
