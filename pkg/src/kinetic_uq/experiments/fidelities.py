"""Per-sample evaluators of every fidelity, on the output times of a run.

Homogeneous evaluators return ``f`` at every output time, shape
``(n_t, n, n)``. Shock-tube evaluators return ``(rho, u_x, temp)`` profiles,
shape ``(n_t, 3, n_cells)``.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from ..collision import RelaxationRate, SpectralPlan
from ..errors import ConfigurationError
from ..grid import Distribution, FloatArray, SpatialGrid, VelocityGrid, maxwellian, moments
from ..initial_data import RiemannFamily, riemann_family
from ..sapnn import (
    EulerSurrogateSampler,
    HomSurrogateSampler,
    NonhomSurrogateSampler,
    SurrogateSampler,
    load_surrogate,
)
from ..solvers import (
    bgk_1d_trajectory,
    boltzmann_1d_trajectory,
    euler_1d_trajectory,
    hom_bgk_trajectory,
    macro_snapshot,
    solve_hom_boltzmann,
)
from ..uq import RandomInputSpec
from .config import CHECKPOINT_FIDELITIES, ExperimentConfig, Fidelity

Evaluator = Callable[[FloatArray], FloatArray]


def output_times(config: ExperimentConfig) -> FloatArray:
    return np.linspace(0.0, config.physics.t_final, config.physics.n_times)


@dataclass
class FidelityFactory:
    """Builds evaluators for one experiment config.

    Parameters
    ----------
    config
        Validated experiment config.
    mu
        BGK frequency of the ``bgk`` and ``sapnn`` fidelities.
    mu_star
        Calibrated frequency, required by ``bgk_calibrated``.
    times
        Output times; the config's uniform times when None.
    """

    config: ExperimentConfig
    mu: float
    mu_star: float | None = None
    times: FloatArray | None = None

    def __post_init__(self) -> None:
        if self.times is None:
            self.times = output_times(self.config)

    @cached_property
    def grid(self) -> VelocityGrid:
        return self.config.discretization.velocity_grid()

    @cached_property
    def spatial(self) -> SpatialGrid:
        return self.config.discretization.spatial_grid()

    @cached_property
    def plan(self) -> SpectralPlan:
        return self.config.discretization.spectral_plan()

    @cached_property
    def family(self) -> RiemannFamily:
        return riemann_family(self.config.physics.problem.replace("-", "_"))

    @property
    def box(self) -> RandomInputSpec:
        if self.config.physics.is_homogeneous:
            return self.config.physics.two_bump.random_input()
        return self.family.random_input()

    def initial(self, z: FloatArray) -> Distribution:
        return self.config.physics.two_bump.initial(z, self.grid)

    def _checkpoint(self, fidelity: Fidelity) -> SurrogateSampler:
        path = getattr(self.config.surrogate, CHECKPOINT_FIDELITIES[fidelity])
        if path is None:
            raise ConfigurationError(f"fidelity {fidelity!r} needs a checkpoint")
        initial = self.initial if self.config.physics.is_homogeneous else None
        return load_surrogate(path, initial)

    def build(self, fidelity: Fidelity) -> Evaluator:
        """Evaluator ``z -> values`` of ``fidelity``.

        Raises
        ------
        ConfigurationError
            If the fidelity does not exist for the problem, or needs a
            checkpoint or calibrated frequency the run does not have.
        """
        if self.config.physics.is_homogeneous:
            return self._homogeneous(fidelity)
        return self._field(fidelity)

    def _rate(self, fidelity: Fidelity) -> RelaxationRate:
        if fidelity == "bgk_calibrated":
            if self.mu_star is None:
                raise ConfigurationError("bgk_calibrated needs a calibrated mu")
            return RelaxationRate(self.mu_star, self.config.physics.eps)
        return RelaxationRate(self.mu, self.config.physics.eps)

    def _homogeneous(self, fidelity: Fidelity) -> Evaluator:
        physics = self.config.physics
        times = self.times
        n_t = times.size

        match fidelity:
            case "boltzmann":
                dt = self.config.discretization.dt
                plan = self.plan
                return lambda z: solve_hom_boltzmann(
                    self.initial(z), physics.eps, physics.t_final, dt, plan, times
                ).values
            case "bgk" | "bgk_calibrated":
                rate = self._rate(fidelity)
                return lambda z: hom_bgk_trajectory(self.initial(z), rate, times).values
            case "sapnn" | "sapnn_calibrated":
                sampler = self._checkpoint(fidelity)
                _check_kind(sampler, HomSurrogateSampler, fidelity)
                return lambda z: sampler.trajectory(z, times).values
            case "initial":
                return lambda z: np.repeat(self.initial(z).values[None], n_t, axis=0)
            case "maxwellian":
                return lambda z: np.repeat(
                    _equilibrium(self.initial(z))[None], n_t, axis=0
                )
        raise ConfigurationError(f"fidelity {fidelity!r} is not defined for two-bump")

    def _field(self, fidelity: Fidelity) -> Evaluator:
        physics = self.config.physics
        cfl = self.config.discretization.cfl
        times = self.times
        spatial, grid, family = self.spatial, self.grid, self.family

        match fidelity:
            case "boltzmann":
                plan = self.plan
                return lambda z: boltzmann_1d_trajectory(
                    family.kinetic_init(z, spatial, grid), physics.eps, times, plan, cfl
                ).macro_array()
            case "bgk":
                rate = self._rate(fidelity)
                return lambda z: bgk_1d_trajectory(
                    family.kinetic_init(z, spatial, grid), rate, times, cfl
                ).macro_array()
            case "euler":
                return lambda z: euler_1d_trajectory(
                    family.euler_init(z, spatial), times, cfl
                ).macro_array()
            case "sapnn":
                sampler = self._checkpoint(fidelity)
                _check_kind(sampler, NonhomSurrogateSampler, fidelity)
                return lambda z: np.stack(
                    [macro_snapshot(sampler.evaluate(z, t)) for t in times]
                )
            case "euler_pinn":
                sampler = self._checkpoint(fidelity)
                _check_kind(sampler, EulerSurrogateSampler, fidelity)
                return lambda z: np.stack([_profiles(sampler, z, t) for t in times])
        raise ConfigurationError(
            f"fidelity {fidelity!r} is not defined for {physics.problem}"
        )


def _equilibrium(f0: Distribution) -> FloatArray:
    return maxwellian(moments(f0), f0.grid).values


def _profiles(sampler: EulerSurrogateSampler, z: FloatArray, t: float) -> FloatArray:
    state = sampler.macro(z, t)
    return np.stack([state.rho, state.u[:, 0], state.temp])


def _check_kind(sampler: object, expected: type, fidelity: Fidelity) -> None:
    if not isinstance(sampler, expected):
        raise ConfigurationError(
            f"checkpoint for {fidelity!r} holds a {type(sampler).__name__}, "
            f"expected {expected.__name__}"
        )
