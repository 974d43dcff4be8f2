"""Composite Gauss-Lobatto reference expectations over a uniform random input."""

import logging
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from numpy.polynomial import legendre

from src.utils import chunk_slices, map_with_progress

from ..errors import ConfigurationError, InvalidInputError
from ..grid import FloatArray
from .sampling import RandomInputSpec


logger = logging.getLogger(__name__)

MAX_REFERENCE_DIM = 2
EVALUATION_CHUNK = 256


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes ``(M, d_z)`` and weights ``(M,)`` summing to one."""

    nodes: FloatArray
    weights: FloatArray

    def __len__(self) -> int:
        return int(self.weights.shape[0])


def lobatto_nodes_weights(n_nodes: int) -> tuple[FloatArray, FloatArray]:
    """Gauss-Lobatto nodes and weights on ``[-1, 1]``.

    The interior nodes are the roots of ``P'_{N-1}``; weights are
    ``2 / (N (N - 1) P_{N-1}(x)^2)``. Exact for polynomials of degree
    ``2N - 3``.
    """
    if n_nodes < 2:
        raise ConfigurationError(f"need at least 2 Lobatto nodes, got {n_nodes}")

    degree = n_nodes - 1
    basis = legendre.Legendre.basis(degree)
    interior = np.sort(np.real(basis.deriv().roots())) if degree > 1 else np.array([])
    nodes = np.concatenate([[-1.0], interior, [1.0]])
    weights = 2.0 / (n_nodes * degree * basis(nodes) ** 2)
    return nodes, weights


def _composite_axis(
    low: float, high: float, n_cells: int, n_nodes: int
) -> tuple[FloatArray, FloatArray]:
    """Composite rule on ``[low, high]`` normalized to the uniform density."""
    ref_nodes, ref_weights = lobatto_nodes_weights(n_nodes)
    edges = np.linspace(low, high, n_cells + 1)
    n_points = n_cells * (n_nodes - 1) + 1
    nodes = np.empty(n_points)
    weights = np.zeros(n_points)

    for cell in range(n_cells):
        half = 0.5 * (edges[cell + 1] - edges[cell])
        mid = 0.5 * (edges[cell + 1] + edges[cell])
        start = cell * (n_nodes - 1)
        nodes[start : start + n_nodes] = mid + half * ref_nodes
        # Shared endpoints accumulate the weight of both neighbouring cells.
        weights[start : start + n_nodes] += half * ref_weights

    nodes[0], nodes[-1] = low, high
    return nodes, weights / (high - low)


def gauss_lobatto_rule(
    spec: RandomInputSpec, n_cells: int, n_nodes: int
) -> QuadratureRule:
    """Tensorized composite Gauss-Lobatto rule for ``spec`` with ``d_z <= 2``."""
    if spec.dim > MAX_REFERENCE_DIM:
        raise ConfigurationError(
            f"reference quadrature supports d_z <= {MAX_REFERENCE_DIM}, got {spec.dim}"
        )
    if n_cells < 1:
        raise ConfigurationError(f"n_cells must be positive, got {n_cells}")

    axes = [_composite_axis(lo, hi, n_cells, n_nodes) for lo, hi in spec.box]
    grids = np.meshgrid(*[nodes for nodes, _ in axes], indexing="ij")
    weight_grids = np.meshgrid(*[weights for _, weights in axes], indexing="ij")
    nodes = np.stack([grid.ravel() for grid in grids], axis=-1)
    weights = np.prod(np.stack([w.ravel() for w in weight_grids]), axis=0)
    return QuadratureRule(nodes, weights)


def _as_array(result: Any) -> FloatArray:
    return np.asarray(getattr(result, "values", result), dtype=np.float64)


def quadrature_expectation(
    rule: QuadratureRule,
    evaluator: Callable[[FloatArray], Any],
    jobs: int = 1,
    show_progress: bool = False,
) -> FloatArray:
    """Weighted sum of evaluator outputs over the rule's nodes.

    Nodes are evaluated in fixed chunks and accumulated in node order, so the
    result does not depend on ``jobs``.
    """
    total: FloatArray | None = None
    for chunk in chunk_slices(len(rule), EVALUATION_CHUNK):
        outputs = map_with_progress(
            lambda z: _as_array(evaluator(z)),
            list(rule.nodes[chunk]),
            jobs=jobs,
            description="Reference quadrature",
            disable=not show_progress,
        )
        stacked = np.stack(outputs)
        if not np.all(np.isfinite(stacked)):
            raise InvalidInputError("evaluator returned non-finite values")
        partial = np.tensordot(rule.weights[chunk], stacked, axes=1)
        total = partial if total is None else total + partial

    assert total is not None
    return total


def gauss_lobatto_reference(
    spec: RandomInputSpec,
    evaluator: Callable[[FloatArray], Any],
    n_cells: int,
    n_nodes: int,
    jobs: int = 1,
    show_progress: bool = False,
) -> FloatArray:
    """Reference ``E[evaluator(z)]`` by composite Gauss-Lobatto quadrature.

    Parameters
    ----------
    spec
        Uniform random input with one or two components.
    evaluator
        Maps a z-vector to an array (or an object with ``values``).
    n_cells
        Equal cells per component.
    n_nodes
        Lobatto nodes per cell, at least 2.
    """
    rule = gauss_lobatto_rule(spec, n_cells, n_nodes)
    logger.info(
        "Gauss-Lobatto reference with %d nodes (%d cells x %d nodes, d_z=%d)",
        len(rule),
        n_cells,
        n_nodes,
        spec.dim,
    )
    return quadrature_expectation(rule, evaluator, jobs, show_progress)
