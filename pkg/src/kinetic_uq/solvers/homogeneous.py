"""Space-homogeneous BGK (exact) and Boltzmann (RK2) time integration."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from rich.progress import track

from ..collision import (
    RelaxationRate,
    SpectralPlan,
    boltzmann_operator,
    loss_frequency_bound,
)
from ..errors import ConfigurationError, InvalidInputError
from ..grid import (
    Distribution,
    FloatArray,
    VelocityGrid,
    check_negatives,
    clip_negatives,
    maxwellian,
    moments,
)


logger = logging.getLogger(__name__)

DEFAULT_DT_FRACTION = 0.01


@dataclass(frozen=True, eq=False)
class HomTrajectory:
    """Homogeneous states at strictly increasing output times.

    ``values`` has shape ``(n_times, n, n)``.
    """

    times: FloatArray
    grid: VelocityGrid
    values: FloatArray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1 or np.any(np.diff(times) <= 0):
            raise InvalidInputError("trajectory times must be strictly increasing")
        if self.values.shape != (times.size, *self.grid.shape):
            raise InvalidInputError(
                f"values shape {self.values.shape} does not match "
                f"{times.size} times on {self.grid.shape}"
            )
        object.__setattr__(self, "times", times)

    @property
    def states(self) -> list[Distribution]:
        return [Distribution(self.grid, row) for row in self.values]

    def final(self) -> Distribution:
        return Distribution(self.grid, self.values[-1])


def _output_times(output_times: ArrayLike | None, t_final: float) -> FloatArray:
    if output_times is None:
        times = np.array([0.0, t_final]) if t_final > 0 else np.array([0.0])
    else:
        times = np.asarray(output_times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0 or times[0] < 0:
        raise InvalidInputError("output times must be a nonempty 1D array >= 0")
    if np.any(np.diff(times) <= 0):
        raise InvalidInputError("output times must be strictly increasing")
    return times


def solve_hom_bgk(f0: Distribution, rate: RelaxationRate, t: float) -> Distribution:
    """Exact BGK relaxation ``M + exp(-mu t / eps) (f0 - M)``.

    Works per cell for fields. Written as ``f0 d + M (1 - d)`` so that
    ``t = 0`` returns ``f0`` and large ``t`` returns ``M`` exactly.
    """
    if t < 0:
        raise InvalidInputError(f"t must be nonnegative, got {t}")

    equilibrium = maxwellian(moments(f0), f0.grid, f0.spatial).values
    decay = math.exp(-rate.frequency * t)
    return f0.with_values(f0.values * decay + equilibrium * (1.0 - decay))


def hom_bgk_trajectory(
    f0: Distribution, rate: RelaxationRate, times: ArrayLike
) -> HomTrajectory:
    """Exact BGK states at each of ``times``."""
    times = _output_times(times, 0.0)
    equilibrium = maxwellian(moments(f0), f0.grid).values
    decay = np.exp(-rate.frequency * times)[:, None, None]
    values = f0.values * decay + equilibrium * (1.0 - decay)
    return HomTrajectory(times, f0.grid, values)


def _heun_step(
    values: FloatArray,
    dt: float,
    eps: float,
    grid: VelocityGrid,
    plan: SpectralPlan,
) -> FloatArray:
    def _rhs(current: FloatArray) -> FloatArray:
        return boltzmann_operator(Distribution(grid, current), plan).values / eps

    slope = _rhs(values)
    predictor = values + dt * slope
    return values + 0.5 * dt * (slope + _rhs(predictor))


def solve_hom_boltzmann(
    f0: Distribution,
    eps: float,
    t_final: float,
    dt: float | None,
    plan: SpectralPlan,
    output_times: ArrayLike | None = None,
    show_progress: bool = False,
) -> HomTrajectory:
    """Integrate ``df/dt = Q(f, f) / eps`` with Heun's method.

    Parameters
    ----------
    f0
        Initial homogeneous distribution.
    eps
        Knudsen number.
    t_final
        Final time; ignored when ``output_times`` is given.
    dt
        Largest allowed step, ``0.01 eps`` when None. Each interval between
        output times is split into equal steps no larger than ``dt``.
    plan
        Spectral plan for ``f0.grid``.
    output_times
        Strictly increasing times at which states are stored.

    Raises
    ------
    ConfigurationError
        If ``dt`` exceeds ``eps / (2 rho)`` (explicit stability bound).
    """
    if eps <= 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    if f0.is_field:
        raise InvalidInputError("solve_hom_boltzmann expects a homogeneous state")

    dt = DEFAULT_DT_FRACTION * eps if dt is None else dt
    bound = loss_frequency_bound(f0)
    if not (0 < dt <= eps / (2.0 * bound)):
        raise ConfigurationError(
            f"dt={dt:.3e} violates the stability bound eps/(2 rho)="
            f"{eps / (2.0 * bound):.3e}"
        )

    times = _output_times(output_times, t_final)
    values = clip_negatives(f0.values.copy())
    stored = np.empty((times.size, *f0.grid.shape))

    current_time = 0.0
    intervals = track(
        range(times.size),
        description="Boltzmann steps",
        disable=not show_progress,
    )
    for index in intervals:
        span = times[index] - current_time
        if span > 0:
            n_steps = max(1, math.ceil(span / dt - 1e-9))
            step = span / n_steps
            for _ in range(n_steps):
                values = _heun_step(values, step, eps, f0.grid, plan)
                check_negatives(values, "Boltzmann state")
        current_time = times[index]
        stored[index] = values

    logger.debug("Boltzmann trajectory finished at t=%.4g", current_time)
    return HomTrajectory(times, f0.grid, stored)
