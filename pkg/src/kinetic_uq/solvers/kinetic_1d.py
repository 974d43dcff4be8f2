"""1D x 2V kinetic solvers by Strang splitting of transport and collisions.

Each step is ``collide(dt/2) -> transport(dt) -> collide(dt/2)``. The BGK
collision step is the exact local exponential map; the Boltzmann collision
step is a penalized implicit-explicit update around the loss-frequency
bound. Both stay stable for ``eps`` much smaller than ``dt``.
"""

import logging
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike
from rich.progress import track

from ..collision import RelaxationRate, SpectralPlan, boltzmann_operator
from ..errors import InvalidInputError
from ..grid import Distribution, FloatArray, clip_negatives, conserved_quantities
from .fields import FieldTrajectory, KineticField
from .homogeneous import solve_hom_bgk
from .transport import check_cfl, step_schedule, transport_step


logger = logging.getLogger(__name__)

CollisionStep = Callable[[KineticField, float], KineticField]


def _kinetic_trajectory(
    init: KineticField,
    output_times: ArrayLike,
    cfl: float,
    collide: CollisionStep,
    show_progress: bool,
) -> FieldTrajectory[KineticField]:
    check_cfl(cfl)
    times = np.asarray(output_times, dtype=np.float64)
    max_dt = cfl * init.spatial.dx / init.grid.extent
    schedule = step_schedule(times, max_dt)

    current = init.with_values(clip_negatives(init.values.copy()))
    fields: list[KineticField] = []
    outflow_total = np.zeros(4)
    fluxes = []

    intervals = track(
        schedule, description="Kinetic steps", disable=not show_progress
    )
    for step, n_steps in intervals:
        for _ in range(n_steps):
            current = collide(current, 0.5 * step)
            values, outflow = transport_step(
                current.values, init.grid.vx, step, init.spatial.dx
            )
            outflow_total += conserved_quantities(
                Distribution(init.grid, outflow)
            )
            current = collide(
                current.with_values(clip_negatives(values, "transported field")),
                0.5 * step,
            )
        fields.append(current)
        fluxes.append(outflow_total.copy())

    return FieldTrajectory(times, fields, np.array(fluxes))


def bgk_1d_trajectory(
    init: KineticField,
    rate: RelaxationRate,
    output_times: ArrayLike,
    cfl: float = 0.5,
    show_progress: bool = False,
) -> FieldTrajectory[KineticField]:
    """BGK fields at each output time, with ``dt = cfl dx / V_max``."""

    def _relax(field: KineticField, dt: float) -> KineticField:
        relaxed = solve_hom_bgk(field.distribution, rate, dt)
        return field.with_values(relaxed.values)

    return _kinetic_trajectory(init, output_times, cfl, _relax, show_progress)


def solve_bgk_1d(
    init: KineticField,
    rate: RelaxationRate,
    t_final: float,
    cfl: float = 0.5,
) -> KineticField:
    """Advance the 1D BGK equation to ``t_final`` with free-flow boundaries."""
    if t_final < 0:
        raise InvalidInputError(f"t_final must be nonnegative, got {t_final}")
    check_cfl(cfl)
    if t_final == 0:
        return init
    return bgk_1d_trajectory(init, rate, [t_final], cfl).final()


def penalized_collision(
    field: KineticField, eps: float, dt: float, plan: SpectralPlan
) -> KineticField:
    """``(f + dt/eps (Q(f) + beta f)) / (1 + beta dt/eps)`` per cell.

    ``beta`` is the cell density, an upper bound of the loss frequency, so
    ``Q(f) + beta f`` is the (nonnegative) gain plus a nonnegative remainder.
    """
    collision = boltzmann_operator(field.distribution, plan).values
    beta = conserved_quantities(field.distribution)[:, 0][:, None, None]
    ratio = dt / eps
    updated = (field.values + ratio * (collision + beta * field.values)) / (
        1.0 + beta * ratio
    )
    return field.with_values(clip_negatives(updated, "collided field"))


def boltzmann_1d_trajectory(
    init: KineticField,
    eps: float,
    output_times: ArrayLike,
    plan: SpectralPlan,
    cfl: float = 0.5,
    show_progress: bool = False,
) -> FieldTrajectory[KineticField]:
    """Boltzmann fields at each output time."""
    if eps <= 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")

    def _collide(field: KineticField, dt: float) -> KineticField:
        return penalized_collision(field, eps, dt, plan)

    return _kinetic_trajectory(init, output_times, cfl, _collide, show_progress)


def solve_boltzmann_1d(
    init: KineticField,
    eps: float,
    t_final: float,
    cfl: float,
    plan: SpectralPlan,
) -> KineticField:
    """Advance the 1D Boltzmann equation to ``t_final``."""
    if t_final < 0:
        raise InvalidInputError(f"t_final must be nonnegative, got {t_final}")
    check_cfl(cfl)
    if t_final == 0:
        return init
    return boltzmann_1d_trajectory(init, eps, [t_final], plan, cfl).final()


def macro_snapshot(field: KineticField) -> FloatArray:
    """``(rho, u_x, temp)`` per cell, shape ``(3, n_cells)``."""
    state = field.macro()
    return np.stack([state.rho, state.u[:, 0], state.temp])
