"""Trained surrogates exposed as per-sample evaluators for the estimators."""

import abc
import logging
from typing import Any, Callable

import numpy as np
from numpy.typing import ArrayLike

from ..grid import FloatArray
from ..uq import RandomInputSpec


logger = logging.getLogger(__name__)


class SurrogateSampler(abc.ABC):
    """Maps ``(z, t)`` to a predicted state with one forward pass.

    Parameters
    ----------
    box
        Random-input box the surrogate was trained on.
    horizon
        End of the training time window.
    """

    def __init__(self, box: RandomInputSpec, horizon: float) -> None:
        self.box = box
        self.horizon = horizon

    def check_query(self, z: ArrayLike, t: float) -> FloatArray:
        """Return ``z`` as a vector, warning when the query extrapolates."""
        z = np.atleast_1d(np.asarray(z, dtype=np.float64))
        if not self.box.contains(z):
            logger.warning(
                "Surrogate queried outside its training box %s", self.box.box
            )
        if not 0.0 <= t <= self.horizon * (1.0 + 1e-12):
            logger.warning(
                "Surrogate queried at t=%.4g outside its training window [0, %.4g]",
                t,
                self.horizon,
            )
        return z

    @abc.abstractmethod
    def evaluate(self, z: ArrayLike, t: float) -> Any:
        """Predicted state for one sample at time ``t``."""

    def evaluator(self, t: float) -> Callable[[FloatArray], Any]:
        """Per-sample evaluator at fixed ``t``, for ``evaluate_samples``."""
        return lambda z: self.evaluate(z, t)


def surrogate_evaluate(sampler: SurrogateSampler, z: ArrayLike, t: float) -> Any:
    """Single forward pass of ``sampler`` at ``(z, t)``."""
    return sampler.evaluate(z, t)
