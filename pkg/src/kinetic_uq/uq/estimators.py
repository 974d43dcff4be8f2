"""Monte Carlo and multiscale control-variate estimators.

All statistics are built from per-chunk ``(count, mean, co-moment)``
summaries merged along a fixed pairwise tree, so results are bit-identical
for any number of worker threads.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Literal, Sequence

import numpy as np
from numpy.typing import NDArray

from src.utils import chunk_slices, map_with_progress, pairwise_reduce

from ..errors import (
    CommonRandomNumberError,
    ConfigurationError,
    InvalidInputError,
    SampleEvaluationError,
)
from ..grid import FloatArray
from .sampling import SampleSet


logger = logging.getLogger(__name__)

CHUNK_SIZE = 64
VARIANCE_FLOOR = 1e-14
RIDGE_DELTA = 1e-10
CONDITION_LIMIT = 1e12

LambdaMode = float | Literal["optimal_K", "optimal_KL"]
Evaluator = Callable[[FloatArray], Any]


@dataclass(frozen=True, eq=False)
class SampleValues:
    """Evaluator outputs stacked along the first axis, with their sample IDs."""

    values: FloatArray
    sample_ids: NDArray[np.int64]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        ids = np.asarray(self.sample_ids, dtype=np.int64)
        if values.shape[0] != ids.shape[0]:
            raise InvalidInputError(
                f"{values.shape[0]} values for {ids.shape[0]} sample IDs"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sample_ids", ids)

    def __len__(self) -> int:
        return int(self.sample_ids.shape[0])

    def head(self, count: int) -> "SampleValues":
        return SampleValues(self.values[:count], self.sample_ids[:count])


@dataclass(frozen=True, eq=False)
class EstimatorOutput:
    """Pointwise expectation estimate and diagnostics.

    ``variance`` is the unbiased sample variance of the per-sample estimator
    variable (the high-fidelity values for plain MC, the control-corrected
    values otherwise). ``lambda_`` has a leading control axis for multiple
    controls.
    """

    mean: FloatArray
    variance: FloatArray
    n_samples: int
    lambda_: FloatArray | None = None
    correlation: FloatArray | None = None

    @property
    def standard_error(self) -> FloatArray:
        return np.sqrt(self.variance / self.n_samples)


@dataclass(frozen=True, eq=False)
class _Summary:
    count: int
    mean: FloatArray
    comoment: FloatArray

    def covariance(self) -> FloatArray:
        return self.comoment / (self.count - 1)


def _summarize_chunk(chunk: FloatArray) -> _Summary:
    mean = np.mean(chunk, axis=0)
    centered = chunk - mean
    comoment = np.einsum("kv...,kw...->vw...", centered, centered)
    return _Summary(chunk.shape[0], mean, comoment)


def _merge(first: _Summary, second: _Summary) -> _Summary:
    count = first.count + second.count
    delta = second.mean - first.mean
    mean = first.mean + delta * (second.count / count)
    correction = np.einsum("v...,w...->vw...", delta, delta) * (
        first.count * second.count / count
    )
    return _Summary(count, mean, first.comoment + second.comoment + correction)


def _summarize(stack: FloatArray, chunk_size: int = CHUNK_SIZE) -> _Summary:
    """Summaries of ``stack`` with shape ``(K, n_variables, *point_shape)``."""
    chunks = [_summarize_chunk(stack[s]) for s in chunk_slices(stack.shape[0], chunk_size)]
    return pairwise_reduce(chunks, _merge)


def _as_array(result: Any) -> FloatArray:
    values = getattr(result, "values", result)
    return np.asarray(values, dtype=np.float64)


def evaluate_samples(
    samples: SampleSet,
    evaluator: Evaluator,
    jobs: int = 1,
    description: str = "Evaluating samples",
    show_progress: bool = False,
) -> SampleValues:
    """Evaluate ``evaluator`` on every sample, concurrently when ``jobs > 1``.

    The evaluator may return an array or any object with a ``values`` array
    (Distribution, KineticField).

    Raises
    ------
    SampleEvaluationError
        Carrying the smallest failing sample ID.
    """

    def _guarded(index: int) -> FloatArray | BaseException:
        try:
            values = _as_array(evaluator(samples.z_values[index]))
        except Exception as e:  # noqa: BLE001
            return e
        if not np.all(np.isfinite(values)):
            return InvalidInputError("evaluator returned non-finite values")
        return values

    results = map_with_progress(
        _guarded,
        list(range(len(samples))),
        jobs=jobs,
        description=description,
        disable=not show_progress,
    )
    for index, result in enumerate(results):
        if isinstance(result, BaseException):
            sample_id = int(samples.indices[index])
            raise SampleEvaluationError(sample_id, str(result)) from result

    return SampleValues(np.stack(results), samples.indices.copy())  # type: ignore[arg-type]


def _check_common_samples(*groups: SampleValues) -> None:
    reference = groups[0].sample_ids
    for group in groups[1:]:
        if group.sample_ids.shape != reference.shape or np.any(
            group.sample_ids != reference
        ):
            raise CommonRandomNumberError(
                "fidelities were evaluated on different sample IDs"
            )


def _combined_output(
    combined: FloatArray,
    lambda_: FloatArray | None,
    correlation: FloatArray | None,
    offset: FloatArray | float = 0.0,
) -> EstimatorOutput:
    summary = _summarize(combined[:, None])
    count = summary.count
    variance = (
        summary.covariance()[0, 0] if count > 1 else np.zeros_like(summary.mean[0])
    )
    return EstimatorOutput(
        mean=summary.mean[0] + offset,
        variance=variance,
        n_samples=count,
        lambda_=lambda_,
        correlation=correlation,
    )


def mc_from_values(values: SampleValues) -> EstimatorOutput:
    """Pointwise sample mean and unbiased sample variance."""
    if len(values) < 1:
        raise InvalidInputError("need at least one sample")
    return _combined_output(values.values, None, None)


def mc_estimate(
    samples: SampleSet,
    evaluator: Evaluator,
    jobs: int = 1,
) -> EstimatorOutput:
    """Plain Monte Carlo estimate of ``E[evaluator(z)]``."""
    return mc_from_values(evaluate_samples(samples, evaluator, jobs))


def _correlation(covariance: FloatArray, index: int) -> FloatArray:
    """Correlation of variable 0 with variable ``index``, NaN where undefined."""
    denominator = np.sqrt(covariance[0, 0] * covariance[index, index])
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(denominator > 0, covariance[0, index] / denominator, np.nan)
    return np.clip(rho, -1.0, 1.0)


def _degenerate_mask(variance: FloatArray) -> FloatArray:
    scale = float(np.max(variance)) if variance.size else 0.0
    return variance <= VARIANCE_FLOOR * scale


def _lambda_and_correlation(
    hf: FloatArray, lf: FloatArray
) -> tuple[FloatArray, FloatArray]:
    if hf.shape[0] < 2:
        raise InvalidInputError("optimal coefficients need at least two samples")
    if hf.shape != lf.shape:
        raise InvalidInputError(f"shape mismatch {hf.shape} vs {lf.shape}")

    covariance = _summarize(np.stack([hf, lf], axis=1)).covariance()
    var_lf = covariance[1, 1]
    degenerate = _degenerate_mask(var_lf)
    with np.errstate(divide="ignore", invalid="ignore"):
        lambda_ = np.where(degenerate, 1.0, covariance[0, 1] / var_lf)
    return lambda_, _correlation(covariance, 1)


def optimal_lambda(hf: FloatArray, lf: FloatArray) -> FloatArray:
    """Pointwise ``Cov_K(hf, lf) / Var_K(lf)``, 1 where ``Var_K(lf)`` vanishes.

    Parameters
    ----------
    hf, lf
        Samples with the sample axis first, evaluated on common inputs.
    """
    lambda_, _ = _lambda_and_correlation(
        np.asarray(hf, dtype=np.float64), np.asarray(lf, dtype=np.float64)
    )
    return lambda_


def mscv_estimate(
    hf: SampleValues,
    lf: SampleValues,
    lf_mean_ref: FloatArray,
    lambda_mode: LambdaMode = "optimal_K",
    n_reference: int | None = None,
    scalar_lambda: bool = False,
) -> EstimatorOutput:
    """Multiscale control-variate estimate ``E_K[hf - lambda lf] + lambda E[lf]``.

    Parameters
    ----------
    hf, lf
        High- and low-fidelity values on the same samples.
    lf_mean_ref
        Accurate expectation of the low-fidelity model.
    lambda_mode
        A fixed float, ``"optimal_K"`` or ``"optimal_KL"``
        (``L / (K + L)`` times the former, needs ``n_reference``).
    scalar_lambda
        Replace the pointwise coefficient by its average over all points.
    """
    _check_common_samples(hf, lf)
    lf_mean_ref = np.asarray(lf_mean_ref, dtype=np.float64)
    if lf_mean_ref.shape != hf.values.shape[1:]:
        raise InvalidInputError(
            f"reference shape {lf_mean_ref.shape} != {hf.values.shape[1:]}"
        )

    correlation = None
    if isinstance(lambda_mode, str):
        lambda_, correlation = _lambda_and_correlation(hf.values, lf.values)
        if lambda_mode == "optimal_KL":
            if n_reference is None:
                raise ConfigurationError("optimal_KL needs the reference sample count")
            lambda_ = lambda_ * (n_reference / (len(hf) + n_reference))
        elif lambda_mode != "optimal_K":
            raise ConfigurationError(f"unknown lambda mode {lambda_mode!r}")
    else:
        lambda_ = np.full(lf_mean_ref.shape, float(lambda_mode))

    if scalar_lambda:
        lambda_ = np.full(lf_mean_ref.shape, float(np.mean(lambda_)))

    combined = hf.values - lambda_ * lf.values
    return _combined_output(combined, lambda_, correlation, lambda_ * lf_mean_ref)


@dataclass(frozen=True, eq=False)
class GramSchmidtBasis:
    """Orthogonalized controls ``g_k = F_k - sum_{j<k} Gamma_kj g_j``.

    ``samples`` has shape ``(K, I, *points)``, ``variances`` ``(I, *points)``
    and ``projections`` (``Gamma``) and ``transform`` (``g = A F``)
    ``(I, I, *points)``.
    """

    samples: FloatArray
    variances: FloatArray
    projections: FloatArray
    transform: FloatArray


def gram_schmidt(controls: FloatArray) -> GramSchmidtBasis:
    """Pointwise empirical Gram-Schmidt of controls shaped ``(K, I, *points)``."""
    n_controls = controls.shape[1]
    point_shape = controls.shape[2:]
    basis = np.empty_like(controls)
    variances = np.empty((n_controls, *point_shape))
    projections = np.zeros((n_controls, n_controls, *point_shape))
    transform = np.zeros((n_controls, n_controls, *point_shape))

    for k in range(n_controls):
        current = controls[:, k].copy()
        row = np.zeros((n_controls, *point_shape))
        row[k] = 1.0
        for j in range(k):
            covariance = _summarize(
                np.stack([controls[:, k], basis[:, j]], axis=1)
            ).covariance()
            degenerate = _degenerate_mask(variances[j])
            with np.errstate(divide="ignore", invalid="ignore"):
                gamma = np.where(degenerate, 0.0, covariance[0, 1] / variances[j])
            projections[k, j] = gamma
            current = current - gamma * basis[:, j]
            row = row - gamma * transform[j]
        basis[:, k] = current
        transform[k] = row
        variances[k] = _summarize(current[:, None]).covariance()[0, 0]

    return GramSchmidtBasis(basis, variances, projections, transform)


def _direct_coefficients(covariance: FloatArray) -> FloatArray | None:
    """Solve ``C Lambda = b`` pointwise; None when the solve fails."""
    n_controls = covariance.shape[0] - 1
    point_shape = covariance.shape[2:]
    matrix = np.moveaxis(covariance[1:, 1:], (0, 1), (-2, -1)).reshape(
        -1, n_controls, n_controls
    )
    rhs = np.moveaxis(covariance[0, 1:], 0, -1).reshape(-1, n_controls)

    trace = np.trace(matrix, axis1=-2, axis2=-1)
    degenerate = _degenerate_mask(trace)
    solution = np.zeros_like(rhs)
    solution[:, 0] = 1.0

    active = ~degenerate
    if np.any(active):
        sub = matrix[active]
        with np.errstate(divide="ignore", invalid="ignore"):
            condition = np.linalg.cond(sub)
        ill = ~np.isfinite(condition) | (condition > CONDITION_LIMIT)
        if np.any(ill):
            ridge = RIDGE_DELTA * trace[active][ill] / n_controls
            sub[ill] = sub[ill] + ridge[:, None, None] * np.eye(n_controls)
        try:
            solved = np.linalg.solve(sub, rhs[active][..., None])[..., 0]
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(solved)):
            return None
        solution[active] = solved

    return np.moveaxis(solution.reshape(*point_shape, n_controls), -1, 0)


def _orthogonal_coefficients(hf: FloatArray, controls: FloatArray) -> FloatArray:
    basis = gram_schmidt(controls)
    n_controls = controls.shape[1]
    gammas = np.empty_like(basis.variances)
    for k in range(n_controls):
        covariance = _summarize(
            np.stack([hf, basis.samples[:, k]], axis=1)
        ).covariance()
        degenerate = _degenerate_mask(basis.variances[k])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = covariance[0, 1] / basis.variances[k]
        gammas[k] = np.where(degenerate, 1.0 if k == 0 else 0.0, ratio)
    # Lambda = A^T gamma
    return np.einsum("k...,ki...->i...", gammas, basis.transform)


def mmscv_estimate(
    hf: SampleValues,
    lf_list: Sequence[SampleValues],
    lf_mean_refs: Sequence[FloatArray],
    mode: Literal["direct", "orthogonal"] = "direct",
) -> EstimatorOutput:
    """Multiple-control estimate ``E_K[hf - sum_i Lambda_i F_i] + sum_i Lambda_i E[F_i]``.

    ``direct`` solves ``C Lambda = b`` per point, with a ridge of
    ``1e-10 trace(C) / I`` where ``cond(C) > 1e12``; if the solve still fails
    the orthogonal (Gram-Schmidt) coefficients are used instead.
    """
    if not lf_list or len(lf_list) != len(lf_mean_refs):
        raise InvalidInputError("need one reference mean per control")
    _check_common_samples(hf, *lf_list)
    if len(hf) < 2:
        raise InvalidInputError("optimal coefficients need at least two samples")

    controls = np.stack([item.values for item in lf_list], axis=1)
    refs = np.stack([np.asarray(ref, dtype=np.float64) for ref in lf_mean_refs])
    if refs.shape[1:] != hf.values.shape[1:]:
        raise InvalidInputError(
            f"reference shape {refs.shape[1:]} != {hf.values.shape[1:]}"
        )

    covariance = _summarize(np.concatenate([hf.values[:, None], controls], 1)).covariance()
    correlation = np.stack(
        [_correlation(covariance, index) for index in range(1, controls.shape[1] + 1)]
    )

    lambdas = None
    if mode == "direct":
        lambdas = _direct_coefficients(covariance)
        if lambdas is None:
            logger.warning(
                "Control covariance is singular; falling back to orthogonal mode."
            )
    elif mode != "orthogonal":
        raise ConfigurationError(f"unknown MMSCV mode {mode!r}")
    if lambdas is None:
        lambdas = _orthogonal_coefficients(hf.values, controls)

    combined = hf.values - np.einsum("i...,ki...->k...", lambdas, controls)
    offset = np.einsum("i...,i...->...", lambdas, refs)
    return _combined_output(combined, lambdas, correlation, offset)
