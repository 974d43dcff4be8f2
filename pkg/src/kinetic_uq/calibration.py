"""Entropy-matching calibration of the BGK relaxation frequency.

The discrepancy ``J(mu)`` compares the entropy decay of exact BGK relaxation
at frequency ``mu`` with reference Boltzmann entropy curves, in the discrete
``L2(0, T)`` norm over uniform checkpoints, averaged over initial states.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from scipy import optimize

from src.utils import map_with_progress

from .collision import RelaxationRate, SpectralPlan, build_spectral_plan
from .errors import CalibrationBracketError, ConfigurationError, InvalidInputError
from .grid import Distribution, FloatArray, VelocityGrid, entropy
from .initial_data import two_bump
from .solvers import hom_bgk_trajectory, solve_hom_boltzmann


logger = logging.getLogger(__name__)

DEFAULT_CHECKPOINTS = 50
DEFAULT_BRACKET = (0.05, 0.5)
MONOTONE_TOLERANCE = 1e-8
NOMINAL_TWO_BUMP_Z = (0.0, 0.5)


def checkpoint_times(horizon: float, n_checkpoints: int) -> FloatArray:
    return np.linspace(0.0, horizon, n_checkpoints)


def entropy_curve(values: FloatArray, grid: VelocityGrid) -> FloatArray:
    """Entropy of each state in a stack shaped ``(n_t, n, n)``."""
    return np.atleast_1d(entropy(Distribution(grid, values)))


@dataclass(frozen=True, eq=False)
class CalibrationProblem:
    """Initial states with their reference entropy curves on ``[0, horizon]``.

    ``reference`` has shape ``(len(f0_set), n_checkpoints)``.
    """

    f0_set: tuple[Distribution, ...]
    eps: float
    horizon: float
    reference: FloatArray
    n_checkpoints: int = DEFAULT_CHECKPOINTS

    def __post_init__(self) -> None:
        f0_set = tuple(self.f0_set)
        reference = np.asarray(self.reference, dtype=np.float64)
        if not f0_set:
            raise ConfigurationError("calibration needs at least one initial state")
        if self.eps <= 0 or self.horizon <= 0:
            raise ConfigurationError("eps and horizon must be positive")
        if self.n_checkpoints < 2:
            raise ConfigurationError("need at least two entropy checkpoints")
        if reference.shape != (len(f0_set), self.n_checkpoints):
            raise InvalidInputError(
                f"reference shape {reference.shape} is not "
                f"({len(f0_set)}, {self.n_checkpoints})"
            )
        scale = max(1.0, float(np.max(np.abs(reference))))
        if np.any(np.diff(reference, axis=1) > MONOTONE_TOLERANCE * scale):
            raise InvalidInputError("reference entropy curves must be nonincreasing")
        object.__setattr__(self, "f0_set", f0_set)
        object.__setattr__(self, "reference", reference)

    @property
    def times(self) -> FloatArray:
        return checkpoint_times(self.horizon, self.n_checkpoints)


@dataclass(frozen=True)
class CalibrationResult:
    """Calibrated frequency, its discrepancy and every ``(mu, J)`` probe."""

    mu_star: float
    discrepancy: float
    probes: list[tuple[float, float]] = field(default_factory=list)

    @property
    def inverse(self) -> float:
        return 1.0 / self.mu_star


def bgk_entropy_curves(mu: float, problem: CalibrationProblem) -> FloatArray:
    rate = RelaxationRate(mu, problem.eps)
    return np.stack(
        [
            entropy_curve(hom_bgk_trajectory(f0, rate, problem.times).values, f0.grid)
            for f0 in problem.f0_set
        ]
    )


def entropy_discrepancy(mu: float, problem: CalibrationProblem) -> float:
    """``J(mu)``: mean over initial states of ``sqrt(T mean_k dH_k^2)``."""
    if not (np.isfinite(mu) and mu > 0):
        raise InvalidInputError(f"mu must be positive, got {mu}")
    difference = bgk_entropy_curves(mu, problem) - problem.reference
    per_state = np.sqrt(problem.horizon * np.mean(difference**2, axis=1))
    return float(np.mean(per_state))


def build_bgk_reference(
    f0_set: Sequence[Distribution],
    eps: float,
    horizon: float,
    mu: float,
    n_checkpoints: int = DEFAULT_CHECKPOINTS,
) -> CalibrationProblem:
    """Problem whose reference is exact BGK relaxation at ``mu``."""
    times = checkpoint_times(horizon, n_checkpoints)
    rate = RelaxationRate(mu, eps)
    reference = np.stack(
        [
            entropy_curve(hom_bgk_trajectory(f0, rate, times).values, f0.grid)
            for f0 in f0_set
        ]
    )
    return CalibrationProblem(tuple(f0_set), eps, horizon, reference, n_checkpoints)


def build_boltzmann_reference(
    f0_set: Sequence[Distribution],
    eps: float,
    horizon: float,
    n_checkpoints: int = DEFAULT_CHECKPOINTS,
    plan: SpectralPlan | None = None,
    dt: float | None = None,
    show_progress: bool = False,
) -> CalibrationProblem:
    """Problem whose reference is the spectral Boltzmann entropy decay."""
    times = checkpoint_times(horizon, n_checkpoints)
    curves = []
    for f0 in f0_set:
        current_plan = plan if plan is not None else build_spectral_plan(f0.grid)
        trajectory = solve_hom_boltzmann(
            f0,
            eps,
            horizon,
            dt,
            current_plan,
            output_times=times,
            show_progress=show_progress,
        )
        curves.append(entropy_curve(trajectory.values, f0.grid))
    return CalibrationProblem(
        tuple(f0_set), eps, horizon, np.stack(curves), n_checkpoints
    )


def sweep_discrepancy(
    problem: CalibrationProblem, mus: Sequence[float], jobs: int = 1
) -> list[tuple[float, float]]:
    """``(mu, J(mu))`` for every ``mu``, in input order."""
    values = map_with_progress(
        lambda mu: entropy_discrepancy(mu, problem),
        list(mus),
        jobs=jobs,
        description="Discrepancy sweep",
        disable=True,
    )
    return [(float(mu), value) for mu, value in zip(mus, values, strict=True)]


def calibrate_mu(
    problem: CalibrationProblem,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    rel_tol: float = 1e-3,
) -> CalibrationResult:
    """Golden-section minimization of ``J`` inside ``bracket``.

    The bracket ends and their geometric midpoint are probed first; the
    midpoint must beat both ends.

    Raises
    ------
    CalibrationBracketError
        When the probes show no interior minimum.
    """
    lo, hi = (float(value) for value in bracket)
    if not 0 < lo < hi:
        raise ConfigurationError(f"invalid bracket {bracket}")

    probes: list[tuple[float, float]] = []

    def _objective(mu: float) -> float:
        value = entropy_discrepancy(float(mu), problem)
        probes.append((float(mu), value))
        return value

    mid = math.sqrt(lo * hi)
    j_lo, j_mid, j_hi = _objective(lo), _objective(mid), _objective(hi)
    if not (j_mid < j_lo and j_mid < j_hi):
        raise CalibrationBracketError(probes[:3])

    result = optimize.minimize_scalar(
        _objective,
        bracket=(lo, mid, hi),
        method="golden",
        options={"xtol": rel_tol / 4.0},
    )
    mu_star = float(result.x)
    discrepancy = float(result.fun)
    logger.info(
        "Calibrated mu* = %.6g (1/mu* = %.4g), J = %.4e after %d evaluations",
        mu_star,
        1.0 / mu_star,
        discrepancy,
        len(probes),
    )
    return CalibrationResult(mu_star, discrepancy, probes)


def sensitivity_sweep(
    sigmas: Sequence[float],
    ds: Sequence[float],
    rho0s: Sequence[float],
    grid: VelocityGrid,
    eps: float = 1.0,
    horizon: float = 2.0,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    n_checkpoints: int = DEFAULT_CHECKPOINTS,
    dt: float | None = None,
    n_angle: int | None = None,
) -> pd.DataFrame:
    """Calibrated ``mu*`` of the nominal two-bump state over a parameter grid.

    Rows follow ``itertools.product(sigmas, ds, rho0s)``; failed brackets are
    kept with NaN results.
    """
    plan = (
        build_spectral_plan(grid)
        if n_angle is None
        else build_spectral_plan(grid, n_angle)
    )
    rows = []
    for sigma, d, rho0 in itertools.product(sigmas, ds, rho0s):
        f0 = two_bump(NOMINAL_TWO_BUMP_Z, grid, rho0=rho0, sigma=sigma, d=d)
        problem = build_boltzmann_reference(
            [f0], eps, horizon, n_checkpoints, plan, dt
        )
        try:
            result = calibrate_mu(problem, bracket)
            mu_star, discrepancy = result.mu_star, result.discrepancy
        except CalibrationBracketError as e:
            logger.warning(
                "No interior minimum for sigma=%g d=%g rho0=%g: %s", sigma, d, rho0, e
            )
            mu_star, discrepancy = math.nan, math.nan
        rows.append(
            {
                "sigma": sigma,
                "d": d,
                "rho0": rho0,
                "mu_star": mu_star,
                "inv_mu_star": 1.0 / mu_star,
                "discrepancy": discrepancy,
            }
        )
    return pd.DataFrame(rows)
