"""Experiment configuration files.

One TOML file fully determines a run together with its seed. Sections map
one-to-one onto the models below; unknown keys are rejected.
"""

import hashlib
import tomllib
from pathlib import Path
from typing import Literal

import pydantic

from ..collision import DEFAULT_N_ANGLE, SpectralPlan, build_spectral_plan
from ..errors import ConfigurationError
from ..grid import SpatialGrid, VelocityGrid
from ..initial_data import TwoBumpFamily
from ..sapnn import EulerPinnConfig, HomSapnnConfig, NonhomSapnnConfig
from ..solvers.transport import MAX_CFL
from ..uq.estimators import LambdaMode


ExperimentId = Literal[
    "two-bump",
    "sod",
    "lax",
    "double-rarefaction",
    "convergence",
    "calibrate",
    "train-hom",
    "train-nonhom",
    "train-euler",
]
Problem = Literal["two-bump", "sod", "lax", "double-rarefaction"]
Fidelity = Literal[
    "boltzmann",
    "bgk",
    "bgk_calibrated",
    "euler",
    "sapnn",
    "sapnn_calibrated",
    "euler_pinn",
    "initial",
    "maxwellian",
]

HOMOGENEOUS_FIDELITIES = frozenset(
    {"boltzmann", "bgk", "bgk_calibrated", "sapnn", "sapnn_calibrated", "initial", "maxwellian"}
)
FIELD_FIDELITIES = frozenset({"boltzmann", "bgk", "euler", "sapnn", "euler_pinn"})
CHECKPOINT_FIDELITIES = {
    "sapnn": "checkpoint",
    "sapnn_calibrated": "calibrated_checkpoint",
    "euler_pinn": "euler_checkpoint",
}


class _Section(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")


class PhysicsConfig(_Section):
    """Problem, Knudsen number, BGK frequency and time window.

    ``mu = "calibrated"`` uses the entropy-calibrated frequency wherever the
    plain BGK frequency would be used.
    """

    problem: Problem = "two-bump"
    eps: float = pydantic.Field(default=1.0, gt=0)
    mu: float | Literal["calibrated"] = 1.0
    t_final: float = pydantic.Field(default=2.0, gt=0)
    n_times: int = pydantic.Field(default=11, ge=2)
    high_fidelity: Literal["boltzmann", "bgk"] = "boltzmann"
    two_bump: TwoBumpFamily = TwoBumpFamily()

    @pydantic.field_validator("mu")
    @classmethod
    def _positive_mu(cls, value: float | str) -> float | str:
        if isinstance(value, float) and value <= 0:
            raise ValueError(f"mu must be positive, got {value}")
        return value

    @property
    def is_homogeneous(self) -> bool:
        return self.problem == "two-bump"


class DiscretizationConfig(_Section):
    v_max: float = pydantic.Field(default=10.0, gt=0)
    n_per_dim: int = pydantic.Field(default=32, ge=4)
    n_cells: int = pydantic.Field(default=100, ge=1)
    cfl: float = pydantic.Field(default=0.5, gt=0, le=MAX_CFL)
    dt: float | None = pydantic.Field(default=None, gt=0)
    n_angle: int = pydantic.Field(default=DEFAULT_N_ANGLE, ge=4)

    @pydantic.field_validator("n_per_dim")
    @classmethod
    def _even_grid(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"n_per_dim must be even, got {value}")
        return value

    def velocity_grid(self) -> VelocityGrid:
        return VelocityGrid(self.v_max, self.n_per_dim)

    def spatial_grid(self) -> SpatialGrid:
        return SpatialGrid(self.n_cells)

    def spectral_plan(self) -> SpectralPlan:
        return build_spectral_plan(self.velocity_grid(), self.n_angle)


class MethodConfig(_Section):
    """One estimator: plain MC, or control variates built from ``controls``."""

    name: str
    kind: Literal["mc", "mscv", "mmscv"] = "mc"
    controls: list[Fidelity] = pydantic.Field(default_factory=list)
    lambda_mode: LambdaMode = "optimal_K"
    mmscv_mode: Literal["direct", "orthogonal"] = "direct"

    @pydantic.model_validator(mode="after")
    def _check_controls(self) -> "MethodConfig":
        expected = {"mc": (0, 0), "mscv": (1, 1), "mmscv": (2, 16)}[self.kind]
        if not expected[0] <= len(self.controls) <= expected[1]:
            raise ValueError(
                f"method {self.name!r} of kind {self.kind} cannot use "
                f"{len(self.controls)} control(s)"
            )
        return self


class UqConfig(_Section):
    """Sample sizes, seeding, estimators and the quadrature reference.

    ``k_hf`` high-fidelity and ``l_lf`` low-fidelity samples share one
    stream; the first ``k_hf`` samples are common to every fidelity.
    """

    k_hf: int = pydantic.Field(default=50, ge=2)
    l_lf: int = pydantic.Field(default=1000, ge=2)
    seed: int = pydantic.Field(default=0, ge=0)
    replications: int = pydantic.Field(default=1, ge=1)
    methods: list[MethodConfig] = pydantic.Field(
        default_factory=lambda: [MethodConfig(name="MC")]
    )
    reference_cells: int = pydantic.Field(default=8, ge=1)
    reference_nodes: int = pydantic.Field(default=5, ge=2)
    convergence_sizes: list[int] = pydantic.Field(
        default_factory=lambda: [100, 1000, 10000]
    )

    @pydantic.model_validator(mode="after")
    def _check_sizes(self) -> "UqConfig":
        if self.l_lf < self.k_hf:
            raise ValueError(f"l_lf={self.l_lf} must be at least k_hf={self.k_hf}")
        if any(size < 2 for size in self.convergence_sizes):
            raise ValueError("convergence sample sizes must be at least 2")
        names = [method.name for method in self.methods]
        if len(set(names)) != len(names):
            raise ValueError(f"method names must be unique, got {names}")
        return self

    @property
    def controls(self) -> list[Fidelity]:
        """Every control fidelity used by a method, in first-use order."""
        return list(dict.fromkeys(c for method in self.methods for c in method.controls))


class SurrogateConfig(_Section):
    """Checkpoints used as fidelities and the training setups.

    Rate, Knudsen number and horizon of the training configs are taken from
    ``[physics]``; these sections set architecture, weights and schedule.
    """

    checkpoint: Path | None = None
    calibrated_checkpoint: Path | None = None
    euler_checkpoint: Path | None = None
    n_train: int = pydantic.Field(default=20, ge=1)
    train_seed: int = pydantic.Field(default=1, ge=0)
    n_data_times: int = pydantic.Field(default=5, ge=1)
    hom: HomSapnnConfig = HomSapnnConfig()
    nonhom: NonhomSapnnConfig = NonhomSapnnConfig()
    euler: EulerPinnConfig = EulerPinnConfig()


class CalibrationConfig(_Section):
    """Entropy-matching calibration; ``mu_star`` skips the search when set."""

    bracket: tuple[float, float] = (0.05, 0.5)
    n_checkpoints: int = pydantic.Field(default=50, ge=2)
    samples: int = pydantic.Field(default=1, ge=1)
    rel_tol: float = pydantic.Field(default=1e-3, gt=0)
    mu_star: float | None = pydantic.Field(default=None, gt=0)
    sweep_mus: list[float] = pydantic.Field(default_factory=list)
    sweep_sigmas: list[float] = pydantic.Field(default_factory=list)
    sweep_ds: list[float] = pydantic.Field(default_factory=list)
    sweep_rho0s: list[float] = pydantic.Field(default_factory=list)

    @property
    def has_sensitivity_sweep(self) -> bool:
        return bool(self.sweep_sigmas and self.sweep_ds and self.sweep_rho0s)


class OutputConfig(_Section):
    """Run directory, relative to the output root unless absolute."""

    directory: Path | None = None


class ExperimentConfig(_Section):
    experiment: ExperimentId
    physics: PhysicsConfig = PhysicsConfig()
    discretization: DiscretizationConfig = DiscretizationConfig()
    uq: UqConfig = UqConfig()
    surrogate: SurrogateConfig = SurrogateConfig()
    calibration: CalibrationConfig = CalibrationConfig()
    output: OutputConfig = OutputConfig()

    @pydantic.model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if self.experiment in ("two-bump", "sod", "lax", "double-rarefaction") and (
            self.physics.problem != self.experiment
        ):
            raise ValueError(
                f"experiment {self.experiment!r} needs physics.problem = "
                f"{self.experiment!r}, got {self.physics.problem!r}"
            )
        homogeneous_only = ("convergence", "calibrate", "train-hom")
        if self.experiment in homogeneous_only and not self.physics.is_homogeneous:
            raise ValueError(f"{self.experiment} runs on the two-bump problem only")
        if self.experiment in ("train-nonhom", "train-euler") and (
            self.physics.is_homogeneous
        ):
            raise ValueError(f"{self.experiment} needs a shock-tube problem")

        allowed = (
            HOMOGENEOUS_FIDELITIES if self.physics.is_homogeneous else FIELD_FIDELITIES
        )
        for fidelity in self.uq.controls:
            if fidelity not in allowed:
                raise ValueError(
                    f"control {fidelity!r} is not available for {self.physics.problem}"
                )
        return self

    def missing_checkpoints(self) -> list[str]:
        """Checkpoint fields that estimation needs but that point nowhere."""
        if self.experiment not in ("two-bump", "sod", "lax", "double-rarefaction"):
            return []
        missing = []
        for fidelity in self.uq.controls:
            field = CHECKPOINT_FIDELITIES.get(fidelity)
            if field is None:
                continue
            path = getattr(self.surrogate, field)
            if path is None or not Path(path).is_file():
                missing.append(f"surrogate.{field} ({path}) for control {fidelity!r}")
        return missing


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Validate TOML text into an ``ExperimentConfig``.

    Raises
    ------
    ConfigurationError
        On TOML syntax errors, schema violations or missing checkpoints.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"{source} is not valid TOML: {e}") from e

    try:
        config = ExperimentConfig.model_validate(raw)
    except pydantic.ValidationError as e:
        raise ConfigurationError(f"invalid experiment config {source}:\n{e}") from e

    missing = config.missing_checkpoints()
    if missing:
        raise ConfigurationError(
            f"{source} references missing checkpoints: {', '.join(missing)}"
        )
    return config


def load_config(path: Path) -> tuple[ExperimentConfig, str]:
    """Read and validate a config file, returning it with its verbatim text."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file {path} does not exist")
    text = path.read_text(encoding="utf-8")
    return parse_config(text, str(path)), text
