"""Interface for storing and accessing config env vars."""

import logging
from os import environ
from pathlib import Path

import pydantic


ENV_PREFIX = "kinetic_uq_"


class RuntimeConfigs(pydantic.BaseModel):
    """Type-friendly collection of env var configs."""

    # Outputs
    kinetic_uq_output_root: Path = Path("outputs")

    # Execution
    kinetic_uq_jobs: int = pydantic.Field(default=1, ge=1)
    kinetic_uq_log_level: str = "INFO"

    def _check_log_level(self):
        """Ensure that the log level is one the logging module knows."""
        if self.kinetic_uq_log_level.upper() not in logging.getLevelNamesMapping():
            raise ValueError(
                f"KINETIC_UQ_LOG_LEVEL={self.kinetic_uq_log_level!r} is not a "
                "valid logging level."
            )

    @staticmethod
    def from_env_var() -> "RuntimeConfigs":
        """Initialize from env vars."""
        # Add only config line items defined in RuntimeConfigs.
        data: dict[str, str] = {}
        for k, v in environ.items():
            _key = k.lower()
            if _key.startswith(ENV_PREFIX):
                data[_key] = v

        try:
            config = RuntimeConfigs(**data)  # type: ignore[arg-type]
            config._check_log_level()
            return config

        except pydantic.ValidationError as e:
            raise ValueError(
                "Some KINETIC_UQ_* ENV VARs are invalid. See above for details. "
                "Try to load your .env file as follows: \n"
                "```\nuv run --env-file .env -m src.kinetic_uq.cli ...\n```"
            ) from e
