"""Exception hierarchy shared by every kinetic_uq module."""

from typing import Any, Sequence


class KineticUQError(Exception):
    """Raised for any failure the package diagnoses itself."""


class InvalidInputError(KineticUQError, ValueError):
    """Raised when inputs are non-finite, negative beyond tolerance or misshaped."""


class DimensionMismatchError(InvalidInputError):
    """Raised when an input vector does not match the expected dimension."""


class DegenerateStateError(KineticUQError, ValueError):
    """Raised when a state has nonpositive mass or temperature."""


class ConfigurationError(KineticUQError, ValueError):
    """Raised when grids, solvers or experiments are configured inconsistently."""


class GridMismatchError(ConfigurationError):
    """Raised when two objects are bound to different grids."""


class CommonRandomNumberError(KineticUQError):
    """Raised when fidelities were evaluated on different random samples."""


class SampleEvaluationError(KineticUQError):
    """Raised when an evaluator fails on a specific sample."""

    def __init__(self, sample_id: int, message: str) -> None:
        super().__init__(f"sample {sample_id}: {message}")
        self.sample_id = sample_id


class CalibrationBracketError(KineticUQError):
    """Raised when the calibration bracket shows no interior minimum."""

    def __init__(self, probes: Sequence[tuple[float, float]]) -> None:
        described = ", ".join(f"J({mu:.6g})={value:.6g}" for mu, value in probes)
        super().__init__(f"No interior minimum in bracket: {described}")
        self.probes = list(probes)


class NonFiniteLossError(KineticUQError):
    """Raised when a loss term evaluates to NaN or infinity."""

    def __init__(self, term: str, index: int | None = None) -> None:
        where = "" if index is None else f" at collocation point {index}"
        super().__init__(f"Loss term {term!r} is not finite{where}")
        self.term = term
        self.index = index


class TrainingDivergenceError(KineticUQError):
    """Raised when the training loss grows beyond the divergence threshold."""

    def __init__(self, message: str, history: Any) -> None:
        super().__init__(message)
        self.history = history


class VacuumWarning(RuntimeWarning):
    """Issued when the Euler solver floors a near-vacuum cell."""
