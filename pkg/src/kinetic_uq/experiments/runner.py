"""Experiment orchestration: estimation, convergence, calibration, training.

Each entry point takes a validated ``ExperimentConfig`` and writes its tables,
a verbatim copy of the config and a manifest into one run directory.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from src.utils import chunk_slices, map_with_progress

from ..calibration import (
    NOMINAL_TWO_BUMP_Z,
    CalibrationProblem,
    CalibrationResult,
    bgk_entropy_curves,
    build_boltzmann_reference,
    calibrate_mu,
    sensitivity_sweep,
    sweep_discrepancy,
)
from ..collision import RelaxationRate
from ..errors import ConfigurationError
from ..grid import Distribution, FloatArray, entropy
from ..sapnn import (
    FieldTrainingData,
    SurrogateSampler,
    hom_training_data,
    save_surrogate,
    train_euler_pinn,
    train_hom,
    train_nonhom,
)
from ..solvers import bgk_1d_trajectory, euler_1d_trajectory, hom_bgk_trajectory
from ..uq import (
    EstimatorOutput,
    SampleSet,
    SampleValues,
    draw_samples,
    evaluate_samples,
    field_l1_error,
    gauss_lobatto_reference,
    l1_expectation_error,
    l2_relative_error,
    mc_from_values,
    mmscv_estimate,
    mscv_estimate,
    replication_seed,
)
from .config import ExperimentConfig, MethodConfig, config_hash
from .fidelities import Evaluator, FidelityFactory, output_times
from .tables import CONFIG_FILENAME, RunDirectory, RunManifest


logger = logging.getLogger(__name__)

LF_BLOCK = 1024
FIELD_QUANTITIES = ("rho", "u_x", "temp")
BAND_QUANTILES = (0.1, 0.9)
CHECKPOINT_SUFFIX = ".kuqnet"


@dataclass(frozen=True)
class RunResult:
    directory: Path
    manifest: RunManifest


@dataclass(frozen=True, eq=False)
class ControlSamples:
    """Low-fidelity values on the common samples and its reference mean."""

    head: SampleValues
    mean: FloatArray
    count: int


def _open_run(
    config: ExperimentConfig, config_text: str | None, output_root: Path
) -> RunDirectory:
    if config_text is None:
        config_text = config.model_dump_json(indent=2)
    directory = config.output.directory or Path(config.experiment)
    path = directory if directory.is_absolute() else Path(output_root) / directory
    manifest = RunManifest(
        experiment=config.experiment,
        config_sha256=config_hash(config_text),
        seed=config.uq.seed,
    )
    run = RunDirectory(path, manifest)
    run.write_config(config_text)
    logger.info("Run directory %s (config %s)", run.path, CONFIG_FILENAME)
    return run


def _subset(samples: SampleSet, block: slice) -> SampleSet:
    return SampleSet(
        samples.spec, samples.z_values[block], samples.master_seed, samples.indices[block]
    )


def evaluate_control(
    samples: SampleSet,
    evaluator: Evaluator,
    n_head: int,
    jobs: int = 1,
    description: str = "Evaluating control",
    show_progress: bool = False,
) -> ControlSamples:
    """Values on the first ``n_head`` samples and the mean over all of them.

    Samples are evaluated in fixed blocks so memory stays bounded; block sums
    are accumulated in block order.
    """
    head: list[FloatArray] = []
    total: FloatArray | None = None
    for block in chunk_slices(len(samples), LF_BLOCK):
        values = evaluate_samples(
            _subset(samples, block), evaluator, jobs, description, show_progress
        ).values
        if block.start < n_head:
            head.append(values[: n_head - block.start])
        block_sum = np.sum(values, axis=0)
        total = block_sum if total is None else total + block_sum

    assert total is not None
    head_values = np.concatenate(head)
    return ControlSamples(
        SampleValues(head_values, samples.indices[:n_head]),
        total / len(samples),
        len(samples),
    )


def estimate(
    method: MethodConfig, hf: SampleValues, controls: dict[str, ControlSamples]
) -> EstimatorOutput:
    """Run one configured estimator on precomputed fidelity values."""
    if method.kind == "mc":
        return mc_from_values(hf)

    used = [controls[name] for name in method.controls]
    heads = [control.head.head(len(hf)) for control in used]
    if method.kind == "mscv":
        return mscv_estimate(
            hf, heads[0], used[0].mean, method.lambda_mode, n_reference=used[0].count
        )
    return mmscv_estimate(hf, heads, [control.mean for control in used], method.mmscv_mode)


def _mode_label(method: MethodConfig) -> str:
    match method.kind:
        case "mscv":
            return str(method.lambda_mode)
        case "mmscv":
            return method.mmscv_mode
    return "mc"


def resolve_mu(
    config: ExperimentConfig, show_progress: bool = False
) -> tuple[float, float | None]:
    """The BGK frequency of the run and, when needed, the calibrated one."""
    needs_star = config.physics.mu == "calibrated" or any(
        name in ("bgk_calibrated", "sapnn_calibrated") for name in config.uq.controls
    )
    mu_star = config.calibration.mu_star
    if needs_star and mu_star is None:
        if not config.physics.is_homogeneous:
            raise ConfigurationError(
                "shock-tube runs with a calibrated mu need calibration.mu_star"
            )
        mu_star = calibrate_mu(
            calibration_problem(config, show_progress),
            config.calibration.bracket,
            config.calibration.rel_tol,
        ).mu_star
    mu = mu_star if config.physics.mu == "calibrated" else config.physics.mu
    assert mu is not None
    return float(mu), mu_star


def _coefficient_rows(
    times: FloatArray, method: MethodConfig, output: EstimatorOutput
) -> list[dict[str, Any]]:
    if output.lambda_ is None:
        return []
    lambda_ = output.lambda_
    correlation = output.correlation
    if method.kind == "mscv":
        lambda_ = lambda_[None]
        correlation = None if correlation is None else correlation[None]

    rows = []
    for index, control in enumerate(method.controls):
        per_time = lambda_[index].reshape(times.size, -1)
        corr = (
            None if correlation is None else correlation[index].reshape(times.size, -1)
        )
        for j, t in enumerate(times):
            rows.append(
                {
                    "t": t,
                    "method": method.name,
                    "control": control,
                    "lambda_mean": float(np.mean(per_time[j])),
                    "correlation_mean": (
                        np.nan
                        if corr is None or np.all(np.isnan(corr[j]))
                        else float(np.nanmean(corr[j]))
                    ),
                }
            )
    return rows


def _error_rows(
    factory: FidelityFactory,
    name: str,
    mean: FloatArray,
    reference: FloatArray,
    replication: int,
) -> tuple[list[dict[str, Any]], list[dict[str, Any]]]:
    l1_rows, l2_rows = [], []
    grid = factory.grid
    for j, t in enumerate(factory.times):
        if factory.config.physics.is_homogeneous:
            estimate_j = Distribution(grid, mean[j])
            reference_j = Distribution(grid, reference[j])
            common = {"t": t, "method": name, "quantity": "f", "replication": replication}
            l1_rows.append({**common, "l1_error": l1_expectation_error(estimate_j, reference_j)})
            l2_rows.append(
                {**common, "l2_relative_error": l2_relative_error(estimate_j, reference_j)}
            )
        else:
            errors = field_l1_error(mean[j], reference[j], factory.spatial)
            for quantity, error in zip(FIELD_QUANTITIES, errors, strict=True):
                l1_rows.append(
                    {
                        "t": t,
                        "method": name,
                        "quantity": quantity,
                        "l1_error": float(error),
                        "replication": replication,
                    }
                )
    return l1_rows, l2_rows


def _profile_rows(
    factory: FidelityFactory, name: str, mean: FloatArray, std_error: FloatArray | None
) -> list[dict[str, Any]]:
    final = mean[-1]
    final_se = None if std_error is None else std_error[-1]
    rows = []
    if factory.config.physics.is_homogeneous:
        vx, vy = factory.grid.vx.ravel(), factory.grid.vy.ravel()
        values = final.ravel()
        errors = None if final_se is None else final_se.ravel()
        for index in range(values.size):
            rows.append(
                {
                    "v_index": index,
                    "v_x": vx[index],
                    "v_y": vy[index],
                    "quantity": "f",
                    "method": name,
                    "value": values[index],
                    "std_error": np.nan if errors is None else errors[index],
                }
            )
        return rows

    for q, quantity in enumerate(FIELD_QUANTITIES):
        for cell, x in enumerate(factory.spatial.centers):
            rows.append(
                {
                    "x": x,
                    "quantity": quantity,
                    "method": name,
                    "value": final[q, cell],
                    "std_error": np.nan if final_se is None else final_se[q, cell],
                }
            )
    return rows


def _entropy_rows(
    factory: FidelityFactory, name: str, mean: FloatArray
) -> list[dict[str, Any]]:
    """Entropy of an expectation estimate, with negative estimates cut at zero."""
    grid = factory.grid
    return [
        {"t": t, "model": name, "H": float(entropy(Distribution(grid, np.clip(mean[j], 0.0, None))))}
        for j, t in enumerate(factory.times)
    ]


def run_experiment(
    config: ExperimentConfig,
    config_text: str | None = None,
    output_root: Path = Path("outputs"),
    jobs: int = 1,
    show_progress: bool = False,
) -> RunResult:
    """Estimate the expectation with every configured method and compare it
    with the Gauss-Lobatto reference of the high-fidelity model.

    Writes ``error_curves.csv`` (plus ``l2_errors.csv`` and ``entropy.csv``
    for the two-bump problem), ``profiles.csv`` at the final time,
    ``coefficients.csv`` for control-variate methods and ``manifest.json``.
    """
    if config.experiment not in ("two-bump", "sod", "lax", "double-rarefaction"):
        raise ConfigurationError(f"{config.experiment} is not an estimation experiment")

    run = _open_run(config, config_text, output_root)
    uq = config.uq
    with run.stage("calibration"):
        mu, mu_star = resolve_mu(config, show_progress)
    run.manifest.mu, run.manifest.mu_star = mu, mu_star
    run.manifest.lambda_modes = {method.name: _mode_label(method) for method in uq.methods}

    factory = FidelityFactory(config, mu, mu_star)
    hf_evaluator = factory.build(config.physics.high_fidelity)
    control_evaluators = {name: factory.build(name) for name in uq.controls}

    with run.stage("reference"):
        reference = gauss_lobatto_reference(
            factory.box,
            hf_evaluator,
            uq.reference_cells,
            uq.reference_nodes,
            jobs,
            show_progress,
        )

    l1_rows: list[dict[str, Any]] = []
    l2_rows: list[dict[str, Any]] = []
    profile_rows = _profile_rows(factory, "reference", reference, None)
    entropy_rows: list[dict[str, Any]] = []
    coefficient_rows: list[dict[str, Any]] = []
    if config.physics.is_homogeneous:
        entropy_rows += _entropy_rows(factory, "reference", reference)

    for replication in range(uq.replications):
        seed = uq.seed if uq.replications == 1 else replication_seed(uq.seed, replication)
        samples = draw_samples(factory.box, uq.l_lf, seed)
        with run.stage(f"high_fidelity_{replication}"):
            hf = evaluate_samples(
                samples.head(uq.k_hf),
                hf_evaluator,
                jobs,
                f"Evaluating {config.physics.high_fidelity}",
                show_progress,
            )
        with run.stage(f"controls_{replication}"):
            controls = {
                name: evaluate_control(
                    samples, evaluator, uq.k_hf, jobs, f"Evaluating {name}", show_progress
                )
                for name, evaluator in control_evaluators.items()
            }

        for method in uq.methods:
            output = estimate(method, hf, controls)
            rows_1, rows_2 = _error_rows(factory, method.name, output.mean, reference, replication)
            l1_rows += rows_1
            l2_rows += rows_2
            if replication == 0:
                profile_rows += _profile_rows(
                    factory, method.name, output.mean, output.standard_error
                )
                coefficient_rows += _coefficient_rows(factory.times, method, output)
                if config.physics.is_homogeneous:
                    entropy_rows += _entropy_rows(factory, method.name, output.mean)

    run.write_table("error_curves", l1_rows)
    if config.physics.is_homogeneous:
        run.write_table("l2_errors", l2_rows)
        run.write_table("entropy", entropy_rows)
        run.write_table("velocity_profiles", profile_rows, stem="profiles")
    else:
        run.write_table("profiles", profile_rows)
    if coefficient_rows:
        run.write_table("coefficients", coefficient_rows)
    run.finish()
    return RunResult(run.path, run.manifest)


def convergence_study(
    config: ExperimentConfig,
    config_text: str | None = None,
    output_root: Path = Path("outputs"),
    jobs: int = 1,
    show_progress: bool = False,
) -> RunResult:
    """Error at the final time against the sample size, over replications.

    Every method uses ``L`` high-fidelity samples for each ``L`` in
    ``uq.convergence_sizes``; control means use ``max(l_lf, L_max)``
    samples. The fitted log-log slope of the mean error is written to
    ``slopes.csv`` and the replication band to ``convergence_bands.csv``.
    """
    if config.experiment != "convergence":
        raise ConfigurationError("convergence_study needs experiment = 'convergence'")

    run = _open_run(config, config_text, output_root)
    uq = config.uq
    mu, mu_star = resolve_mu(config, show_progress)
    run.manifest.mu, run.manifest.mu_star = mu, mu_star

    factory = FidelityFactory(config, mu, mu_star, times=np.array([config.physics.t_final]))
    grid = factory.grid
    hf_evaluator = factory.build(config.physics.high_fidelity)
    control_evaluators = {name: factory.build(name) for name in uq.controls}
    sizes = sorted(uq.convergence_sizes)
    n_total = max(uq.l_lf, sizes[-1])

    with run.stage("reference"):
        reference = gauss_lobatto_reference(
            factory.box, hf_evaluator, uq.reference_cells, uq.reference_nodes, jobs, show_progress
        )
    reference_final = Distribution(grid, reference[-1])

    rows: list[dict[str, Any]] = []
    with run.stage("replications"):
        for replication in range(uq.replications):
            samples = draw_samples(factory.box, n_total, replication_seed(uq.seed, replication))
            hf = evaluate_samples(samples.head(sizes[-1]), hf_evaluator, jobs)
            controls = {
                name: evaluate_control(samples, evaluator, sizes[-1], jobs)
                for name, evaluator in control_evaluators.items()
            }
            for size in sizes:
                for method in uq.methods:
                    output = estimate(method, hf.head(size), controls)
                    error = l1_expectation_error(
                        Distribution(grid, output.mean[-1]), reference_final
                    )
                    rows.append(
                        {"L": size, "method": method.name, "replication": replication, "l1_error": error}
                    )
            logger.info("Replication %d/%d done", replication + 1, uq.replications)

    band_rows, slope_rows = [], []
    for method in uq.methods:
        means = []
        for size in sizes:
            errors = np.array(
                [r["l1_error"] for r in rows if r["method"] == method.name and r["L"] == size]
            )
            lower, upper = np.quantile(errors, BAND_QUANTILES)
            means.append(float(np.mean(errors)))
            band_rows.append(
                {"L": size, "method": method.name, "mean": means[-1], "lower": lower, "upper": upper}
            )
        slope, intercept = np.polyfit(np.log(sizes), np.log(means), 1)
        slope_rows.append({"method": method.name, "slope": slope, "intercept": intercept})
        logger.info("%s: fitted slope %.3f", method.name, slope)

    run.write_table("convergence", rows)
    run.write_table("convergence_bands", band_rows)
    run.write_table("slopes", slope_rows)
    run.finish()
    return RunResult(run.path, run.manifest)


def calibration_problem(
    config: ExperimentConfig, show_progress: bool = False
) -> CalibrationProblem:
    """Boltzmann entropy reference of the nominal (or sampled) two-bump states."""
    grid = config.discretization.velocity_grid()
    family = config.physics.two_bump
    calibration = config.calibration
    if calibration.samples == 1:
        z_values: Any = [np.array(NOMINAL_TWO_BUMP_Z)]
    else:
        z_values = draw_samples(
            family.random_input(), calibration.samples, config.uq.seed
        ).z_values
    f0_set = [family.initial(z, grid) for z in z_values]
    return build_boltzmann_reference(
        f0_set,
        config.physics.eps,
        config.physics.t_final,
        calibration.n_checkpoints,
        config.discretization.spectral_plan(),
        config.discretization.dt,
        show_progress,
    )


def run_calibration(
    config: ExperimentConfig,
    config_text: str | None = None,
    output_root: Path = Path("outputs"),
    jobs: int = 1,
    show_progress: bool = False,
) -> tuple[RunResult, CalibrationResult]:
    """Calibrate ``mu`` against Boltzmann entropy decay.

    Writes ``calibration.json``, ``entropy.csv`` (Boltzmann, BGK at the
    configured and at the calibrated ``mu``), ``discrepancy.csv`` (probes and
    sweep) and, when sweep values are configured, ``mu_sensitivity.csv``.
    """
    if config.experiment != "calibrate":
        raise ConfigurationError("run_calibration needs experiment = 'calibrate'")

    run = _open_run(config, config_text, output_root)
    calibration = config.calibration
    with run.stage("reference"):
        problem = calibration_problem(config, show_progress)
    with run.stage("golden_section"):
        result = calibrate_mu(problem, calibration.bracket, calibration.rel_tol)
    run.manifest.mu_star = result.mu_star

    discrepancy_rows = [{"mu": mu, "J": j, "source": "probe"} for mu, j in result.probes]
    if calibration.sweep_mus:
        with run.stage("sweep"):
            discrepancy_rows += [
                {"mu": mu, "J": j, "source": "sweep"}
                for mu, j in sweep_discrepancy(problem, calibration.sweep_mus, jobs)
            ]

    curves = {
        "boltzmann": problem.reference,
        "bgk_mu_star": bgk_entropy_curves(result.mu_star, problem),
    }
    if isinstance(config.physics.mu, float):
        run.manifest.mu = config.physics.mu
        curves["bgk_mu"] = bgk_entropy_curves(config.physics.mu, problem)
    entropy_rows = [
        {"t": t, "model": model, "H": float(value)}
        for model, curve in curves.items()
        for t, value in zip(problem.times, np.mean(curve, axis=0), strict=True)
    ]

    run.write_json(
        "calibration.json",
        {
            "mu_star": result.mu_star,
            "inv_mu_star": result.inverse,
            "discrepancy": result.discrepancy,
            "n_evaluations": len(result.probes),
            "bracket": list(calibration.bracket),
        },
    )
    run.write_table("entropy", entropy_rows)
    run.write_table("discrepancy", discrepancy_rows)

    if calibration.has_sensitivity_sweep:
        with run.stage("sensitivity"):
            frame = sensitivity_sweep(
                calibration.sweep_sigmas,
                calibration.sweep_ds,
                calibration.sweep_rho0s,
                config.discretization.velocity_grid(),
                config.physics.eps,
                config.physics.t_final,
                calibration.bracket,
                calibration.n_checkpoints,
                config.discretization.dt,
                config.discretization.n_angle,
            )
        run.write_frame("mu_sensitivity", frame)

    run.finish()
    return RunResult(run.path, run.manifest), result


def _data_times(config: ExperimentConfig, data_fraction: float) -> FloatArray:
    t_max = data_fraction * config.physics.t_final
    n_times = config.surrogate.n_data_times
    return np.linspace(0.0, t_max, n_times) if t_max > 0 else np.zeros(1)


def _checkpoint_path(run: RunDirectory, target: Path | None, stem: str) -> Path:
    if target is not None:
        return Path(target)
    return run.output_path(f"{stem}{CHECKPOINT_SUFFIX}")


def _validation_rows(
    factory: FidelityFactory,
    sampler: SurrogateSampler,
    truth: Evaluator,
    z_values: FloatArray,
) -> list[dict[str, Any]]:
    """Surrogate against its training model at the final time, per held-out z."""
    t_final = float(factory.times[-1])
    rows = []
    for index, z in enumerate(z_values):
        expected = truth(z)[-1]
        if factory.config.physics.is_homogeneous:
            predicted = sampler.evaluate(z, t_final).values
            pairs = [("f", predicted, expected)]
            weight = factory.grid.cell_area
        else:
            state = sampler.macro(z, t_final)  # type: ignore[attr-defined]
            predicted = np.stack([state.rho, state.u[:, 0], state.temp])
            pairs = list(zip(FIELD_QUANTITIES, predicted, expected, strict=True))
            weight = factory.spatial.dx
        for quantity, prediction, target in pairs:
            l1 = float(np.sum(np.abs(prediction - target)) * weight)
            scale = float(np.sum(np.abs(target)) * weight)
            rows.append(
                {
                    "sample": index,
                    "quantity": quantity,
                    "l1_error": l1,
                    "relative_l1_error": l1 / scale if scale > 0 else np.nan,
                    "min_value": float(np.min(prediction)),
                }
            )
    return rows


def run_training(
    config: ExperimentConfig,
    config_text: str | None = None,
    output_root: Path = Path("outputs"),
    jobs: int = 1,
    show_progress: bool = False,
    n_validation: int = 10,
) -> RunResult:
    """Train the surrogate named by the experiment and save its checkpoint.

    Training samples come from the ``surrogate.train_seed`` stream; the
    held-out validation samples from an independent replication key.
    Writes the checkpoint, ``loss_history.csv`` and ``validation.csv``.
    """
    if config.experiment not in ("train-hom", "train-nonhom", "train-euler"):
        raise ConfigurationError(f"{config.experiment} is not a training experiment")

    run = _open_run(config, config_text, output_root)
    physics, surrogate = config.physics, config.surrogate
    mu, mu_star = resolve_mu(config, show_progress)
    run.manifest.mu, run.manifest.mu_star = mu, mu_star
    run.manifest.seed = surrogate.train_seed
    rate = RelaxationRate(mu, physics.eps)

    factory = FidelityFactory(config, mu, mu_star)
    box = factory.box
    train = draw_samples(box, surrogate.n_train, surrogate.train_seed)
    held_out = draw_samples(box, n_validation, replication_seed(surrogate.train_seed, 1))
    grid, spatial = factory.grid, factory.spatial
    cfl = config.discretization.cfl

    sampler: SurrogateSampler
    if config.experiment == "train-hom":
        hom = surrogate.hom.model_copy(
            update={"mu": mu, "eps": physics.eps, "horizon": physics.t_final}
        )
        times = _data_times(config, hom.data_fraction)
        initial_states = [factory.initial(z) for z in train.z_values]
        trajectories = [hom_bgk_trajectory(f0, rate, times) for f0 in initial_states]
        data = hom_training_data(
            initial_states, hom.g_floor, trajectories, hom.data_fraction * hom.horizon
        )
        with run.stage("training"):
            sampler = train_hom(hom, data, factory.initial, box, show_progress)
        truth = factory.build("bgk")
        target = surrogate.calibrated_checkpoint if physics.mu == "calibrated" else surrogate.checkpoint

    elif config.experiment == "train-nonhom":
        nonhom = surrogate.nonhom.model_copy(
            update={
                "mu": mu,
                "eps": physics.eps,
                "horizon": physics.t_final,
                "n_l": grid.n_nodes,
            }
        )
        times = _data_times(config, nonhom.data_fraction)
        with run.stage("training_data"):
            trajectories = map_with_progress(
                lambda z: bgk_1d_trajectory(
                    factory.family.kinetic_init(z, spatial, grid), rate, times, cfl
                ),
                list(train.z_values),
                jobs=jobs,
                description="BGK training trajectories",
                disable=not show_progress,
            )
        data = FieldTrainingData.from_trajectories(trajectories, train.z_values, box)
        with run.stage("training"):
            sampler = train_nonhom(nonhom, data, show_progress)
        truth = factory.build("bgk")
        target = surrogate.checkpoint

    else:
        euler = surrogate.euler.model_copy(update={"horizon": physics.t_final})
        times = _data_times(config, euler.data_fraction)
        with run.stage("training_data"):
            trajectories = map_with_progress(
                lambda z: euler_1d_trajectory(factory.family.euler_init(z, spatial), times, cfl),
                list(train.z_values),
                jobs=jobs,
                description="Euler training trajectories",
                disable=not show_progress,
            )
        data = FieldTrainingData.from_trajectories(trajectories, train.z_values, box)
        with run.stage("training"):
            sampler = train_euler_pinn(euler, data, grid, show_progress)
        truth = factory.build("euler")
        target = surrogate.euler_checkpoint

    path = _checkpoint_path(run, target, config.experiment.replace("-", "_"))
    save_surrogate(path, sampler)
    history = getattr(sampler, "history", None)
    if history is not None:
        history.write_csv(run.output_path("loss_history.csv"))
    with run.stage("validation"):
        run.write_table(
            "validation", _validation_rows(factory, sampler, truth, held_out.z_values)
        )
    run.finish()
    return RunResult(run.path, run.manifest)
