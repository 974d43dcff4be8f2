"""Sampling, multi-fidelity estimators, reference quadrature and error metrics."""

from .estimators import (
    EstimatorOutput,
    GramSchmidtBasis,
    SampleValues,
    evaluate_samples,
    gram_schmidt,
    mc_estimate,
    mc_from_values,
    mmscv_estimate,
    mscv_estimate,
    optimal_lambda,
)
from .metrics import field_l1_error, l1_expectation_error, l2_relative_error
from .reference import (
    QuadratureRule,
    gauss_lobatto_reference,
    gauss_lobatto_rule,
    lobatto_nodes_weights,
    quadrature_expectation,
)
from .sampling import RandomInputSpec, SampleSet, draw_samples, replication_seed


__all__ = [
    "EstimatorOutput",
    "GramSchmidtBasis",
    "QuadratureRule",
    "RandomInputSpec",
    "SampleSet",
    "SampleValues",
    "draw_samples",
    "evaluate_samples",
    "field_l1_error",
    "gauss_lobatto_reference",
    "gauss_lobatto_rule",
    "gram_schmidt",
    "l1_expectation_error",
    "l2_relative_error",
    "lobatto_nodes_weights",
    "mc_estimate",
    "mc_from_values",
    "mmscv_estimate",
    "mscv_estimate",
    "optimal_lambda",
    "quadrature_expectation",
    "replication_seed",
]
