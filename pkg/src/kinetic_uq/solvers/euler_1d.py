"""Finite-volume solver for the 1D compressible Euler equations with gamma = 2.

The closure ``p = rho T``, ``E = rho (|u|^2 + 2 T) / 2`` is the fluid limit of
the 2V kinetic models. Transverse velocity ``u_y`` is carried as a passive
momentum component.
"""

import logging
import warnings

import numpy as np
from numpy.typing import ArrayLike
from rich.progress import Progress

from ..errors import InvalidInputError, VacuumWarning
from ..grid import FloatArray
from .fields import EulerField, FieldTrajectory
from .transport import check_cfl, minmod


logger = logging.getLogger(__name__)

GAMMA = 2.0
VACUUM_DENSITY = 1e-10
VACUUM_PRESSURE = 1e-12
N_GHOST = 2


def primitive(conserved: FloatArray) -> FloatArray:
    """``(rho, u_x, u_y, p)`` from ``(rho, m_x, m_y, E)`` along the last axis."""
    rho = conserved[..., 0]
    u_x = conserved[..., 1] / rho
    u_y = conserved[..., 2] / rho
    pressure = (GAMMA - 1.0) * (conserved[..., 3] - 0.5 * rho * (u_x**2 + u_y**2))
    return np.stack([rho, u_x, u_y, pressure], axis=-1)


def conservative(prim: FloatArray) -> FloatArray:
    rho, u_x, u_y, pressure = np.moveaxis(prim, -1, 0)
    energy = pressure / (GAMMA - 1.0) + 0.5 * rho * (u_x**2 + u_y**2)
    return np.stack([rho, rho * u_x, rho * u_y, energy], axis=-1)


def physical_flux(prim: FloatArray) -> FloatArray:
    rho, u_x, u_y, pressure = np.moveaxis(prim, -1, 0)
    energy = pressure / (GAMMA - 1.0) + 0.5 * rho * (u_x**2 + u_y**2)
    return np.stack(
        [
            rho * u_x,
            rho * u_x**2 + pressure,
            rho * u_x * u_y,
            u_x * (energy + pressure),
        ],
        axis=-1,
    )


def sound_speed(prim: FloatArray) -> FloatArray:
    return np.sqrt(GAMMA * prim[..., 3] / prim[..., 0])


def _rusanov_fluxes(conserved: FloatArray) -> FloatArray:
    padded = np.pad(conserved, [(N_GHOST, N_GHOST), (0, 0)], mode="edge")
    prim = primitive(padded)
    slopes = minmod(prim[1:-1] - prim[:-2], prim[2:] - prim[1:-1])
    centers = prim[1:-1]
    left = (centers + 0.5 * slopes)[:-1]
    right = (centers - 0.5 * slopes)[1:]

    # Reconstruction can undershoot near vacuum; fall back to first order there.
    bad = (np.minimum(left[:, 0], right[:, 0]) <= 0) | (
        np.minimum(left[:, 3], right[:, 3]) <= 0
    )
    if np.any(bad):
        left[bad] = centers[:-1][bad]
        right[bad] = centers[1:][bad]

    speed = np.maximum(
        np.abs(left[:, 1]) + sound_speed(left),
        np.abs(right[:, 1]) + sound_speed(right),
    )[:, None]
    return 0.5 * (physical_flux(left) + physical_flux(right)) - 0.5 * speed * (
        conservative(right) - conservative(left)
    )


def _apply_floor(conserved: FloatArray) -> FloatArray:
    prim = primitive(conserved)
    vacuum = (prim[:, 0] <= VACUUM_DENSITY) | (prim[:, 3] <= VACUUM_PRESSURE)
    if not np.any(vacuum):
        return conserved

    n_cells = int(np.sum(vacuum))
    min_density = float(np.min(prim[:, 0]))
    logger.warning(
        "Vacuum floor activated in %d cell(s); min density %.3e",
        n_cells,
        min_density,
    )
    warnings.warn(
        f"vacuum floor activated in {n_cells} cell(s)", VacuumWarning, stacklevel=3
    )

    floored = conserved.copy()
    rows = floored[vacuum]
    rows[:, 0] = np.maximum(rows[:, 0], VACUUM_DENSITY)
    rows_prim = primitive(rows)
    rows_prim[:, 3] = np.maximum(rows_prim[:, 3], VACUUM_PRESSURE)
    floored[vacuum] = conservative(rows_prim)
    return floored


def _max_speed(conserved: FloatArray) -> float:
    prim = primitive(conserved)
    return float(np.max(np.abs(prim[:, 1]) + sound_speed(prim)))


def euler_1d_trajectory(
    init: EulerField,
    output_times: ArrayLike,
    cfl: float = 0.5,
    show_progress: bool = False,
) -> FieldTrajectory[EulerField]:
    """Rusanov/MUSCL/SSP-RK2 states at each output time.

    The time step is ``cfl dx / max(|u_x| + c)``, shortened so that every
    output time is hit exactly.
    """
    check_cfl(cfl)
    times = np.asarray(output_times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0 or times[0] < 0:
        raise InvalidInputError("output times must be a nonempty 1D array >= 0")
    if np.any(np.diff(times) <= 0):
        raise InvalidInputError("output times must be strictly increasing")

    dx = init.spatial.dx
    conserved = init.conserved.copy()
    current_time = 0.0
    outflow_total = np.zeros(4)
    fields: list[EulerField] = []
    fluxes = []

    with Progress(disable=not show_progress) as progress:
        task = progress.add_task("Euler steps", total=float(times[-1]))
        for target in times:
            while current_time < target:
                dt = min(cfl * dx / _max_speed(conserved), target - current_time)
                flux = _rusanov_fluxes(conserved)
                stage = _apply_floor(conserved - dt / dx * (flux[1:] - flux[:-1]))
                stage_flux = _rusanov_fluxes(stage)
                conserved = _apply_floor(
                    0.5 * conserved
                    + 0.5 * (stage - dt / dx * (stage_flux[1:] - stage_flux[:-1]))
                )
                effective = 0.5 * (flux + stage_flux)
                outflow_total += dt * (effective[-1] - effective[0])
                current_time = target if dt == target - current_time else current_time + dt
                progress.update(task, completed=current_time)
            fields.append(EulerField(init.spatial, conserved.copy()))
            fluxes.append(outflow_total.copy())

    return FieldTrajectory(times, fields, np.array(fluxes))


def solve_euler_1d(init: EulerField, t_final: float, cfl: float = 0.5) -> EulerField:
    """Advance the Euler system to ``t_final`` with zero-gradient boundaries."""
    if t_final < 0:
        raise InvalidInputError(f"t_final must be nonnegative, got {t_final}")
    check_cfl(cfl)
    if t_final == 0:
        return init
    return euler_1d_trajectory(init, [t_final], cfl).final()
