"""Multi-fidelity uncertainty quantification for kinetic equations."""

from .errors import (
    CalibrationBracketError,
    CommonRandomNumberError,
    ConfigurationError,
    DegenerateStateError,
    DimensionMismatchError,
    GridMismatchError,
    InvalidInputError,
    KineticUQError,
    NonFiniteLossError,
    SampleEvaluationError,
    TrainingDivergenceError,
    VacuumWarning,
)


__all__ = [
    "CalibrationBracketError",
    "CommonRandomNumberError",
    "ConfigurationError",
    "DegenerateStateError",
    "DimensionMismatchError",
    "GridMismatchError",
    "InvalidInputError",
    "KineticUQError",
    "NonFiniteLossError",
    "SampleEvaluationError",
    "TrainingDivergenceError",
    "VacuumWarning",
]
