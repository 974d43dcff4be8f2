"""Second-order upwind transport ``f_t + v_x f_x = 0`` on the unit interval.

MUSCL reconstruction with the minmod limiter, upwind interface fluxes per
velocity node, SSP-RK2 in time and two zero-gradient ghost cells per side.
"""

import math

import numpy as np
from numpy.typing import ArrayLike

from ..errors import ConfigurationError, InvalidInputError
from ..grid import FloatArray


MAX_CFL = 0.9
N_GHOST = 2


def check_cfl(cfl: float) -> None:
    if not (0 < cfl <= MAX_CFL):
        raise ConfigurationError(f"cfl must lie in (0, {MAX_CFL}], got {cfl}")


def minmod(a: FloatArray, b: FloatArray) -> FloatArray:
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _interface_flux(values: FloatArray, velocity: FloatArray) -> FloatArray:
    """Upwind fluxes at the ``n_cells + 1`` interfaces, ghost cells added here."""
    padded = np.pad(
        values, [(N_GHOST, N_GHOST)] + [(0, 0)] * (values.ndim - 1), mode="edge"
    )
    slopes = minmod(padded[1:-1] - padded[:-2], padded[2:] - padded[1:-1])
    centers = padded[1:-1]
    left = (centers + 0.5 * slopes)[:-1]
    right = (centers - 0.5 * slopes)[1:]
    return np.maximum(velocity, 0.0) * left + np.minimum(velocity, 0.0) * right


def transport_step(
    values: FloatArray, velocity: FloatArray, dt: float, dx: float
) -> tuple[FloatArray, FloatArray]:
    """Advance one SSP-RK2 step.

    Parameters
    ----------
    values
        Cell values with cells on the first axis.
    velocity
        Advection speed broadcastable against ``values[0]``.

    Returns
    -------
    tuple
        New values and the per-node net outflow ``dt (F_right - F_left)``
        through the two boundaries.
    """
    flux = _interface_flux(values, velocity)
    stage = values - dt / dx * (flux[1:] - flux[:-1])
    stage_flux = _interface_flux(stage, velocity)
    updated = 0.5 * values + 0.5 * (stage - dt / dx * (stage_flux[1:] - stage_flux[:-1]))

    effective = 0.5 * (flux + stage_flux)
    outflow = dt * (effective[-1] - effective[0])
    return updated, outflow


def step_schedule(
    output_times: ArrayLike, max_dt: float
) -> list[tuple[float, int]]:
    """Split each interval between output times into equal steps <= ``max_dt``.

    Returns one ``(step, n_steps)`` pair per output time; the first pair covers
    ``[0, times[0]]``.
    """
    times = np.asarray(output_times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0 or times[0] < 0:
        raise InvalidInputError("output times must be a nonempty 1D array >= 0")
    if np.any(np.diff(times) <= 0):
        raise InvalidInputError("output times must be strictly increasing")

    schedule = []
    previous = 0.0
    for time in times:
        span = float(time - previous)
        n_steps = max(1, math.ceil(span / max_dt - 1e-9)) if span > 0 else 0
        schedule.append((span / n_steps if n_steps else 0.0, n_steps))
        previous = float(time)
    return schedule
