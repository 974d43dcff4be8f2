"""Error metrics between estimated and reference expectations."""

import numpy as np
from numpy.typing import ArrayLike

from ..errors import GridMismatchError, InvalidInputError
from ..grid import Distribution, FloatArray, SpatialGrid, weighted_norm


def _difference(estimate: Distribution, reference: Distribution) -> Distribution:
    if estimate.grid != reference.grid or estimate.spatial != reference.spatial:
        raise GridMismatchError("estimate and reference live on different grids")
    if estimate.values.shape != reference.values.shape:
        raise GridMismatchError(
            f"shape {estimate.values.shape} != {reference.values.shape}"
        )
    return estimate.with_values(estimate.values - reference.values)


def l1_expectation_error(
    estimate: Distribution, reference: Distribution, s: float = 0.0
) -> float:
    """``int |estimate - reference| (1 + |v|)^s``, over space too for fields."""
    return float(weighted_norm(_difference(estimate, reference), s, 1))


def l2_relative_error(estimate: Distribution, reference: Distribution) -> float:
    """Relative discrete L2 distance; the absolute one when the reference is zero."""
    error = float(weighted_norm(_difference(estimate, reference), 0.0, 2))
    scale = float(weighted_norm(reference, 0.0, 2))
    return error / scale if scale > 0 else error


def field_l1_error(
    estimate: ArrayLike, reference: ArrayLike, spatial: SpatialGrid
) -> FloatArray | float:
    """Midpoint L1 error in ``x`` of macroscopic profiles.

    Profiles have the cells along the last axis; leading axes (quantities)
    are kept.
    """
    estimate = np.asarray(estimate, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if estimate.shape != reference.shape or estimate.shape[-1] != spatial.n_cells:
        raise InvalidInputError(
            f"profile shapes {estimate.shape} and {reference.shape} do not match "
            f"{spatial.n_cells} cells"
        )
    error = np.sum(np.abs(estimate - reference), axis=-1) * spatial.dx
    return float(error) if np.ndim(error) == 0 else error
