"""Save and restore trained surrogate samplers as network checkpoints."""

import logging
from pathlib import Path
from typing import Callable

from ..errors import ConfigurationError, InvalidInputError
from ..grid import Distribution, FloatArray, SpatialGrid, VelocityGrid
from ..nn import Mlp, load_checkpoint, save_checkpoint
from ..uq import RandomInputSpec
from .euler_pinn import EulerPinnConfig, EulerSurrogate, EulerSurrogateSampler
from .homogeneous import HomSapnnConfig, HomSurrogate, HomSurrogateSampler
from .nonhomogeneous import NonhomSapnnConfig, NonhomSurrogate, NonhomSurrogateSampler
from .sampler import SurrogateSampler


logger = logging.getLogger(__name__)

AnySampler = HomSurrogateSampler | NonhomSurrogateSampler | EulerSurrogateSampler


def _networks(sampler: SurrogateSampler) -> dict[str, Mlp]:
    if isinstance(sampler, HomSurrogateSampler):
        return {"net": sampler.model.net}
    if isinstance(sampler, NonhomSurrogateSampler):
        return {"g_net": sampler.model.g_net, "macro_net": sampler.model.macro_net}
    if isinstance(sampler, EulerSurrogateSampler):
        return {"macro_net": sampler.model.macro_net}
    raise ConfigurationError(f"cannot checkpoint {type(sampler).__name__}")


def save_surrogate(path: Path, sampler: SurrogateSampler) -> Path:
    """Write the sampler's networks with enough metadata to rebuild it."""
    path = Path(path)
    save_checkpoint(path, _networks(sampler), sampler.metadata())
    logger.info("Saved %s surrogate to %s", sampler.metadata()["kind"], path)
    return path


def load_surrogate(
    path: Path,
    initial: Callable[[FloatArray], Distribution] | None = None,
) -> AnySampler:
    """Rebuild a sampler written by ``save_surrogate``.

    Parameters
    ----------
    path
        Checkpoint file.
    initial
        Initial-data family ``z -> f0``; required for homogeneous surrogates.

    Raises
    ------
    ConfigurationError
        If the file is missing or a homogeneous surrogate has no ``initial``.
    InvalidInputError
        If the file is corrupt or of an unknown kind.
    """
    checkpoint = load_checkpoint(path)
    meta = checkpoint.metadata
    try:
        kind = meta["kind"]
        grid = VelocityGrid(**meta["grid"])
        box = RandomInputSpec(tuple(tuple(item) for item in meta["box"]))
    except (KeyError, TypeError) as e:
        raise InvalidInputError(f"checkpoint {path} lacks surrogate metadata") from e
    nets = checkpoint.networks

    if kind == "hom":
        if initial is None:
            raise ConfigurationError("homogeneous surrogates need the initial-data family")
        config = HomSapnnConfig.model_validate(meta["config"])
        model = HomSurrogate(
            nets["net"], config.horizon, config.initial_condition, config.reconstruction
        )
        return HomSurrogateSampler(model, grid, initial, box, config)

    if kind == "nonhom":
        config = NonhomSapnnConfig.model_validate(meta["config"])
        model = NonhomSurrogate(nets["g_net"], nets["macro_net"])
        return NonhomSurrogateSampler(
            model, grid, SpatialGrid(meta["n_cells"]), box, config
        )

    if kind == "euler":
        config = EulerPinnConfig.model_validate(meta["config"])
        return EulerSurrogateSampler(
            EulerSurrogate(nets["macro_net"]), grid, SpatialGrid(meta["n_cells"]), box, config
        )

    raise InvalidInputError(f"unknown surrogate kind {kind!r} in {path}")
