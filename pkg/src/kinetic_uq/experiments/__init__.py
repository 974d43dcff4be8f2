"""Experiment configs, fidelity evaluators, orchestration and result tables."""

from .config import (
    CalibrationConfig,
    DiscretizationConfig,
    ExperimentConfig,
    Fidelity,
    MethodConfig,
    OutputConfig,
    PhysicsConfig,
    SurrogateConfig,
    UqConfig,
    config_hash,
    load_config,
    parse_config,
)
from .fidelities import Evaluator, FidelityFactory, output_times
from .runner import (
    RunResult,
    calibration_problem,
    convergence_study,
    estimate,
    evaluate_control,
    resolve_mu,
    run_calibration,
    run_experiment,
    run_training,
)
from .tables import TABLE_COLUMNS, RunDirectory, RunManifest, table_frame


__all__ = [
    "TABLE_COLUMNS",
    "CalibrationConfig",
    "DiscretizationConfig",
    "Evaluator",
    "ExperimentConfig",
    "Fidelity",
    "FidelityFactory",
    "MethodConfig",
    "OutputConfig",
    "PhysicsConfig",
    "RunDirectory",
    "RunManifest",
    "RunResult",
    "SurrogateConfig",
    "UqConfig",
    "calibration_problem",
    "config_hash",
    "convergence_study",
    "estimate",
    "evaluate_control",
    "load_config",
    "output_times",
    "parse_config",
    "resolve_mu",
    "run_calibration",
    "run_experiment",
    "run_training",
    "table_frame",
]
