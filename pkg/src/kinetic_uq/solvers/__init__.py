"""Deterministic kinetic and fluid solvers."""

from .euler_1d import GAMMA, euler_1d_trajectory, solve_euler_1d
from .fields import EulerField, FieldTrajectory, KineticField
from .homogeneous import (
    HomTrajectory,
    hom_bgk_trajectory,
    solve_hom_bgk,
    solve_hom_boltzmann,
)
from .kinetic_1d import (
    bgk_1d_trajectory,
    boltzmann_1d_trajectory,
    macro_snapshot,
    solve_bgk_1d,
    solve_boltzmann_1d,
)
from .riemann import PrimitiveState, exact_riemann


__all__ = [
    "GAMMA",
    "EulerField",
    "FieldTrajectory",
    "HomTrajectory",
    "KineticField",
    "PrimitiveState",
    "bgk_1d_trajectory",
    "boltzmann_1d_trajectory",
    "euler_1d_trajectory",
    "exact_riemann",
    "hom_bgk_trajectory",
    "macro_snapshot",
    "solve_bgk_1d",
    "solve_boltzmann_1d",
    "solve_euler_1d",
    "solve_hom_bgk",
    "solve_hom_boltzmann",
]
