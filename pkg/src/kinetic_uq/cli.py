"""Batch experiment runner.

Usage:

    uv run kinetic-uq run configs/two_bump_desk.toml --jobs 4 --progress
    uv run kinetic-uq calibrate configs/calibrate_desk.toml
    uv run kinetic-uq train configs/train_hom_desk.toml
    uv run kinetic-uq convergence configs/convergence_desk.toml
    uv run kinetic-uq inspect checkpoints/two_bump_mu1.kuqnet

Exit status is 0 on success, 2 on a diagnosed error (invalid config, missing
checkpoint, failed calibration bracket, diverged training) and 1 otherwise.
"""

import argparse
import logging
from pathlib import Path
from typing import Sequence

from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

from src.utils import RuntimeConfigs, pretty_print, set_up_logging

from .errors import ConfigurationError, KineticUQError
from .experiments import (
    convergence_study,
    load_config,
    run_calibration,
    run_experiment,
    run_training,
)
from .nn import read_checkpoint_header


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_DIAGNOSED = 2

COMMAND_EXPERIMENTS = {
    "run": ("two-bump", "sod", "lax", "double-rarefaction"),
    "calibrate": ("calibrate",),
    "train": ("train-hom", "train-nonhom", "train-euler"),
    "convergence": ("convergence",),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinetic-uq",
        description="Multi-fidelity uncertainty quantification for kinetic equations.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for command, help_text in (
        ("run", "estimate expectations with MC and control-variate methods"),
        ("calibrate", "calibrate the BGK frequency against Boltzmann entropy decay"),
        ("train", "train a neural surrogate and save its checkpoint"),
        ("convergence", "error against sample size over replications"),
    ):
        sub = subparsers.add_parser(command, help=help_text)
        sub.add_argument("config", type=Path, help="experiment TOML file")
        sub.add_argument(
            "--jobs", type=int, default=None, help="worker threads (default: env)"
        )
        sub.add_argument(
            "--output-root",
            type=Path,
            default=None,
            help="root of run directories (default: KINETIC_UQ_OUTPUT_ROOT)",
        )
        sub.add_argument("--progress", action="store_true", help="show progress bars")

    inspect = subparsers.add_parser("inspect", help="print a checkpoint header")
    inspect.add_argument("checkpoint", type=Path)
    return parser


def _inspect(path: Path) -> None:
    header = read_checkpoint_header(path)
    table = Table(title=str(path))
    table.add_column("network")
    table.add_column("layers")
    table.add_column("activation")
    table.add_column("parameters", justify="right")
    for network in header.networks:
        table.add_row(
            network.name,
            " x ".join(str(dim) for dim in network.spec.layer_dims),
            network.spec.activation,
            str(network.n_parameters),
        )
    Console().print(table)
    pretty_print(header.metadata)


def _run(args: argparse.Namespace, runtime: RuntimeConfigs) -> None:
    config, text = load_config(args.config)
    expected = COMMAND_EXPERIMENTS[args.command]
    if config.experiment not in expected:
        raise ConfigurationError(
            f"'{args.command}' runs experiments {', '.join(expected)}; "
            f"{args.config} has experiment = {config.experiment!r}"
        )

    jobs = args.jobs if args.jobs is not None else runtime.kinetic_uq_jobs
    if jobs < 1:
        raise ConfigurationError(f"--jobs must be positive, got {jobs}")
    options = {
        "config_text": text,
        "output_root": args.output_root or runtime.kinetic_uq_output_root,
        "jobs": jobs,
        "show_progress": args.progress,
    }
    logger.info("Running %s from %s with %d job(s)", config.experiment, args.config, jobs)

    match args.command:
        case "run":
            result = run_experiment(config, **options)
        case "calibrate":
            result, calibration = run_calibration(config, **options)
            logger.info(
                "mu* = %.6g (1/mu* = %.4g)", calibration.mu_star, calibration.inverse
            )
        case "train":
            result = run_training(config, **options)
        case _:
            result = convergence_study(config, **options)

    pretty_print({"directory": result.directory, "outputs": result.manifest.outputs})


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``kinetic-uq`` command; returns the exit status."""
    load_dotenv(verbose=True)
    args = build_parser().parse_args(argv)

    try:
        runtime = RuntimeConfigs.from_env_var()
    except ValueError as e:
        set_up_logging()
        logger.error("%s", e)
        return EXIT_DIAGNOSED
    set_up_logging(runtime.kinetic_uq_log_level)

    try:
        if args.command == "inspect":
            _inspect(args.checkpoint)
        else:
            _run(args, runtime)
    except KineticUQError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_DIAGNOSED
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_UNEXPECTED
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
