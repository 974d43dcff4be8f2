"""Test the composite Gauss-Lobatto reference quadrature."""

import numpy as np
import pytest

from src.kinetic_uq.errors import ConfigurationError
from src.kinetic_uq.uq import (
    RandomInputSpec,
    gauss_lobatto_reference,
    gauss_lobatto_rule,
    lobatto_nodes_weights,
    quadrature_expectation,
)


def test_two_node_rule_is_trapezoid():
    """Test the smallest Lobatto rule."""
    nodes, weights = lobatto_nodes_weights(2)
    np.testing.assert_allclose(nodes, [-1.0, 1.0])
    np.testing.assert_allclose(weights, [1.0, 1.0])
    with pytest.raises(ConfigurationError):
        lobatto_nodes_weights(1)


@pytest.mark.parametrize("n_nodes", [3, 4, 5, 7])
def test_lobatto_exactness_degree(n_nodes):
    """Test exact integration of monomials up to degree ``2N - 3``."""
    nodes, weights = lobatto_nodes_weights(n_nodes)
    assert nodes[0] == -1.0 and nodes[-1] == 1.0
    for degree in range(2 * n_nodes - 2):
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert np.dot(weights, nodes**degree) == pytest.approx(exact, abs=1e-12)


def test_composite_rule_layout():
    """Test node count, shared endpoints and normalized weights."""
    spec = RandomInputSpec(((-1.0, 1.0), (0.0, 1.0)))
    rule = gauss_lobatto_rule(spec, n_cells=4, n_nodes=5)
    assert len(rule) == (4 * 4 + 1) ** 2
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-13)
    assert np.all(rule.weights > 0)
    assert rule.nodes[:, 0].min() == -1.0 and rule.nodes[:, 1].max() == 1.0


def test_rule_rejects_high_dimension():
    """Test the supported input dimension."""
    spec = RandomInputSpec(((0.0, 1.0),) * 3)
    with pytest.raises(ConfigurationError):
        gauss_lobatto_rule(spec, 2, 3)


def test_reference_of_polynomial_is_exact():
    """Test expectations of low-degree polynomials under the uniform law."""
    spec = RandomInputSpec(((-1.0, 1.0), (0.0, 1.0)))
    reference = gauss_lobatto_reference(
        spec, lambda z: np.array([z[0] ** 2 + z[1], z[0] * z[1] ** 3]), 2, 4
    )
    np.testing.assert_allclose(reference, [1.0 / 3.0 + 0.5, 0.0], atol=1e-13)


def test_reference_converges_for_smooth_function():
    """Test a non-polynomial expectation."""
    spec = RandomInputSpec(((0.0, 1.0),))
    reference = gauss_lobatto_reference(spec, lambda z: np.exp(z), 8, 5)
    assert reference[0] == pytest.approx(np.e - 1.0, rel=1e-10)


def test_quadrature_is_independent_of_jobs():
    """Test bitwise agreement of serial and threaded evaluation."""
    spec = RandomInputSpec(((-1.0, 1.0), (0.0, 1.0)))
    rule = gauss_lobatto_rule(spec, 6, 5)

    def _evaluator(z):
        return np.sin(z[0] * np.arange(4)) + np.cos(z[1])

    serial = quadrature_expectation(rule, _evaluator, jobs=1)
    threaded = quadrature_expectation(rule, _evaluator, jobs=4)
    np.testing.assert_array_equal(serial, threaded)
