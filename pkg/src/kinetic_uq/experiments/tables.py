"""Result tables and the run manifest.

Every CSV is written with a fixed column order, a deterministic row order and
a fixed float format, so identical runs give byte-identical files.
"""

import json
import logging
import time
from contextlib import contextmanager
from importlib import metadata
from pathlib import Path
from typing import Any, Iterator, Sequence

import pandas as pd
import pydantic


logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.10e"
CONFIG_FILENAME = "config.toml"
MANIFEST_FILENAME = "manifest.json"
VERSIONED_PACKAGES = ("kinetic-uq", "numpy", "scipy", "torch", "pandas", "pydantic")

TABLE_COLUMNS: dict[str, tuple[str, ...]] = {
    "error_curves": ("t", "method", "quantity", "l1_error", "replication"),
    "l2_errors": ("t", "method", "quantity", "l2_relative_error", "replication"),
    "profiles": ("x", "quantity", "method", "value", "std_error"),
    "velocity_profiles": ("v_index", "v_x", "v_y", "quantity", "method", "value", "std_error"),
    "coefficients": ("t", "method", "control", "lambda_mean", "correlation_mean"),
    "entropy": ("t", "model", "H"),
    "convergence": ("L", "method", "replication", "l1_error"),
    "convergence_bands": ("L", "method", "mean", "lower", "upper"),
    "slopes": ("method", "slope", "intercept"),
    "discrepancy": ("mu", "J", "source"),
    "mu_sensitivity": ("sigma", "d", "rho0", "mu_star", "inv_mu_star", "discrepancy"),
    "validation": ("sample", "quantity", "l1_error", "relative_l1_error", "min_value"),
}
SORT_KEYS: dict[str, tuple[str, ...]] = {
    "error_curves": ("replication", "method", "quantity", "t"),
    "l2_errors": ("replication", "method", "quantity", "t"),
    "coefficients": ("method", "control", "t"),
    "entropy": ("model", "t"),
    "convergence": ("method", "L", "replication"),
    "convergence_bands": ("method", "L"),
    "slopes": ("method",),
    "validation": ("sample", "quantity"),
}


def package_versions() -> dict[str, str]:
    versions = {}
    for name in VERSIONED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class RunManifest(pydantic.BaseModel):
    """Provenance of one run directory."""

    schema_version: int = SCHEMA_VERSION
    experiment: str
    config_sha256: str
    seed: int
    package_versions: dict[str, str] = pydantic.Field(default_factory=package_versions)
    wall_times: dict[str, float] = pydantic.Field(default_factory=dict)
    lambda_modes: dict[str, str] = pydantic.Field(default_factory=dict)
    mu: float | None = None
    mu_star: float | None = None
    outputs: list[str] = pydantic.Field(default_factory=list)


def table_frame(name: str, rows: Sequence[dict[str, Any]]) -> pd.DataFrame:
    """Rows as a frame with the schema's columns, in deterministic order."""
    columns = list(TABLE_COLUMNS[name])
    frame = pd.DataFrame(list(rows), columns=columns)
    keys = list(SORT_KEYS.get(name, ()))
    if keys and not frame.empty:
        frame = frame.sort_values(keys, kind="mergesort").reset_index(drop=True)
    return frame


class RunDirectory:
    """Output directory of one run; records files and stage timings."""

    def __init__(self, path: Path, manifest: RunManifest) -> None:
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.manifest = manifest

    def _record(self, filename: str) -> Path:
        if filename not in self.manifest.outputs:
            self.manifest.outputs.append(filename)
        return self.path / filename

    def write_config(self, text: str) -> Path:
        """Copy the config verbatim."""
        target = self._record(CONFIG_FILENAME)
        target.write_text(text, encoding="utf-8")
        return target

    def write_table(
        self, name: str, rows: Sequence[dict[str, Any]], stem: str | None = None
    ) -> Path:
        """Write rows under the schema ``name`` to ``<stem or name>.csv``."""
        return self.write_frame(stem or name, table_frame(name, rows))

    def write_frame(self, stem: str, frame: pd.DataFrame) -> Path:
        target = self._record(f"{stem}.csv")
        frame.to_csv(target, index=False, float_format=FLOAT_FORMAT)
        logger.info("Wrote %s (%d rows)", target, len(frame))
        return target

    def write_json(self, filename: str, payload: dict[str, Any]) -> Path:
        target = self._record(filename)
        target.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
        return target

    def output_path(self, filename: str) -> Path:
        """Path of a file written by someone else, recorded in the manifest."""
        return self._record(filename)

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        """Time a block into ``wall_times[name]``."""
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.manifest.wall_times[name] = elapsed
            logger.info("Stage %s finished in %.2fs", name, elapsed)

    def finish(self) -> Path:
        """Write the manifest last, so it lists every output."""
        target = self.path / MANIFEST_FILENAME
        target.write_text(self.manifest.model_dump_json(indent=2), encoding="utf-8")
        return target
