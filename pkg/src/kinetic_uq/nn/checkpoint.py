"""Binary network checkpoints.

Layout: the 8-byte magic ``KUQNET01``, a little-endian uint32 header length,
a UTF-8 JSON header, then every network's parameters as one flat ``<f8``
vector in header order.
"""

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import pydantic

from ..errors import ConfigurationError, InvalidInputError
from .mlp import Mlp, MlpSpec


MAGIC = b"KUQNET01"
HEADER_LENGTH_BYTES = 4
FORMAT_VERSION = 1


class NetworkHeader(pydantic.BaseModel):
    name: str
    spec: MlpSpec
    n_parameters: int


class CheckpointHeader(pydantic.BaseModel):
    """JSON header of a checkpoint file."""

    format_version: int = FORMAT_VERSION
    networks: list[NetworkHeader]
    metadata: dict[str, Any] = pydantic.Field(default_factory=dict)


class Checkpoint(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(arbitrary_types_allowed=True)

    header: CheckpointHeader
    networks: dict[str, Mlp]

    @property
    def metadata(self) -> dict[str, Any]:
        return self.header.metadata


def save_checkpoint(
    path: Path,
    networks: Mlp | Mapping[str, Mlp],
    metadata: Mapping[str, Any] | None = None,
) -> CheckpointHeader:
    """Write one or more named networks and a metadata block to ``path``."""
    if isinstance(networks, Mlp):
        networks = {"net": networks}

    header = CheckpointHeader(
        networks=[
            NetworkHeader(name=name, spec=net.spec, n_parameters=net.n_parameters)
            for name, net in networks.items()
        ],
        metadata=dict(metadata or {}),
    )
    header_bytes = header.model_dump_json().encode("utf-8")
    params = np.concatenate([net.parameter_vector() for net in networks.values()])

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(MAGIC)
        handle.write(len(header_bytes).to_bytes(HEADER_LENGTH_BYTES, "little"))
        handle.write(header_bytes)
        handle.write(params.astype("<f8").tobytes())
    return header


def _read(path: Path) -> tuple[CheckpointHeader, bytes]:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"checkpoint {path} does not exist")
    raw = path.read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise InvalidInputError(f"{path} is not a kinetic-uq checkpoint")

    offset = len(MAGIC)
    length = int.from_bytes(raw[offset : offset + HEADER_LENGTH_BYTES], "little")
    offset += HEADER_LENGTH_BYTES
    try:
        header = CheckpointHeader.model_validate(
            json.loads(raw[offset : offset + length].decode("utf-8"))
        )
    except (ValueError, pydantic.ValidationError) as e:
        raise InvalidInputError(f"corrupt checkpoint header in {path}") from e
    return header, raw[offset + length :]


def read_checkpoint_header(path: Path) -> CheckpointHeader:
    """Header only, without building the networks."""
    return _read(path)[0]


def load_checkpoint(path: Path) -> Checkpoint:
    """Rebuild every stored network with its saved parameters."""
    header, payload = _read(path)
    params = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    expected = sum(item.n_parameters for item in header.networks)
    if params.size != expected:
        raise InvalidInputError(
            f"checkpoint {path} holds {params.size} parameters, header says {expected}"
        )

    networks: dict[str, Mlp] = {}
    offset = 0
    for item in header.networks:
        net = Mlp(item.spec)
        net.load_parameter_vector(params[offset : offset + item.n_parameters])
        offset += item.n_parameters
        networks[item.name] = net
    return Checkpoint(header=header, networks=networks)
