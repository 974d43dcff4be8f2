"""Asymptotic-preserving surrogate of the 1D x 2V BGK equation.

Two networks of ``(x, t, z)``: the g-net predicts ``g = log f`` at all
``N_l`` velocity nodes and the macro-net predicts ``(rho, u_x, u_y, T)``
with softplus on density and temperature. The kinetic residual is scaled by
``eps`` so the loss stays well defined as ``eps -> 0``, where it reduces to
the local-equilibrium penalty.
"""

import logging
from dataclasses import dataclass
from typing import Any, Literal, Protocol

import numpy as np
import pydantic
import torch
from numpy.typing import ArrayLike
from torch import nn

from ..collision import RelaxationRate
from ..errors import ConfigurationError, InvalidInputError
from ..grid import MacroState, SpatialGrid, VelocityGrid
from ..nn import DTYPE, LossHistory, Mlp, TrainingSchedule, build_mlp, optimize
from ..nn.autodiff import directional_derivative, mean_square
from ..solvers import KineticField
from ..uq import RandomInputSpec
from .data import (
    TIME_AXIS,
    X_AXIS,
    FieldCollocation,
    FieldPointSet,
    FieldTrainingData,
    input_normalization,
    query_inputs,
)
from .physics import (
    NodeTensors,
    conserved_from_macro,
    conserved_of,
    flux_x_of,
    macro_from_raw,
    maxwellian_nodes,
    node_tensors,
)
from .sampler import SurrogateSampler


logger = logging.getLogger(__name__)

ResidualForm = Literal["literal", "maxwellian"]


class NonhomLossWeights(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    moment: float = pydantic.Field(default=1.0, ge=0)
    residual_kinetic: float = pydantic.Field(default=1.0, ge=0)
    residual_macro: float = pydantic.Field(default=1.0, ge=0)
    boundary: float = pydantic.Field(default=10.0, ge=0)
    data: float = pydantic.Field(default=10.0, ge=0)

    def as_dict(self) -> dict[str, float]:
        return self.model_dump()


class NonhomSapnnConfig(pydantic.BaseModel):
    """Rate, weights, point counts and the two networks.

    ``residual_form`` selects the relaxation term of the kinetic residual:
    ``"literal"`` uses ``mu (exp(-g) - 1)``, ``"maxwellian"`` uses
    ``mu (M[U] exp(-g) - 1)`` with ``M`` built from the macro-net.
    """

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    mu: float = pydantic.Field(default=1.0, gt=0)
    eps: float = pydantic.Field(default=1e-2, gt=0)
    horizon: float = pydantic.Field(default=0.0875, gt=0)
    data_fraction: float = pydantic.Field(default=0.6, ge=0, le=1)
    n_l: int = pydantic.Field(default=576, ge=1)
    weights: NonhomLossWeights = NonhomLossWeights()
    n_moment: int = pydantic.Field(default=256, ge=1)
    n_residual_kinetic: int = pydantic.Field(default=256, ge=1)
    n_residual_macro: int = pydantic.Field(default=256, ge=1)
    n_boundary: int = pydantic.Field(default=256, ge=0)
    n_data: int = pydantic.Field(default=256, ge=0)
    g_depth: int = pydantic.Field(default=6, ge=1)
    g_width: int = pydantic.Field(default=96, ge=1)
    macro_depth: int = pydantic.Field(default=6, ge=1)
    macro_width: int = pydantic.Field(default=96, ge=1)
    residual_form: ResidualForm = "literal"
    schedule: TrainingSchedule = TrainingSchedule(steps=20000, learning_rate=1e-3)

    @property
    def rate(self) -> RelaxationRate:
        return RelaxationRate(self.mu, self.eps)


class FieldModel(Protocol):
    def log_density(self, inputs: torch.Tensor) -> torch.Tensor: ...

    def macro(self, inputs: torch.Tensor) -> tuple[torch.Tensor, ...]: ...

    def conserved(self, inputs: torch.Tensor) -> torch.Tensor: ...


class NonhomSurrogate(nn.Module):
    """g-net and macro-net evaluated on the same ``(x, t, z)`` inputs."""

    def __init__(self, g_net: Mlp, macro_net: Mlp) -> None:
        super().__init__()
        if macro_net.d_out != 4 or g_net.d_in != macro_net.d_in:
            raise ConfigurationError("macro-net must map the g-net inputs to 4 values")
        self.g_net = g_net
        self.macro_net = macro_net

    def log_density(self, inputs: torch.Tensor) -> torch.Tensor:
        return self.g_net(inputs)

    def macro(self, inputs: torch.Tensor) -> tuple[torch.Tensor, ...]:
        return macro_from_raw(self.macro_net(inputs))

    def conserved(self, inputs: torch.Tensor) -> torch.Tensor:
        return conserved_from_macro(*self.macro(inputs))

    def forward(self, inputs: torch.Tensor) -> torch.Tensor:
        return torch.exp(self.log_density(inputs))


@dataclass(frozen=True, eq=False)
class NonhomPointSets:
    residual_kinetic: torch.Tensor
    residual_macro: torch.Tensor
    moment: torch.Tensor
    boundary: FieldPointSet | None = None
    data: FieldPointSet | None = None


def _check_nodes(g: torch.Tensor, config: NonhomSapnnConfig, nodes: NodeTensors) -> None:
    if config.n_l != nodes.n_nodes or g.shape[-1] != nodes.n_nodes:
        raise ConfigurationError(
            f"velocity output dimension {g.shape[-1]} (config n_l={config.n_l}) "
            f"does not match the {nodes.n_nodes}-node velocity grid"
        )


def _field_mismatch(
    model: FieldModel, points: FieldPointSet | None, term: str
) -> torch.Tensor:
    if points is None or len(points) == 0:
        return torch.zeros((), dtype=DTYPE)
    loss = torch.zeros((), dtype=DTYPE)
    if points.f_target is not None:
        f = torch.exp(model.log_density(points.inputs))
        loss = loss + mean_square(f - points.f_target, term)
    if points.u_target is not None:
        loss = loss + mean_square(model.conserved(points.inputs) - points.u_target, term)
    return loss


def nonhom_losses(
    model: FieldModel,
    config: NonhomSapnnConfig,
    nodes: NodeTensors,
    points: NonhomPointSets,
) -> dict[str, torch.Tensor]:
    """The five loss terms, unweighted.

    Returns
    -------
    dict
        ``moment``, ``residual_kinetic``, ``residual_macro``, ``boundary`` and
        ``data``.

    Raises
    ------
    ConfigurationError
        When the g-net output size differs from the number of velocity nodes.
    """
    rate = config.rate
    kinetic_points = points.residual_kinetic

    g, dg_dt = directional_derivative(model.log_density, kinetic_points, TIME_AXIS)
    _check_nodes(g, config, nodes)
    _, dg_dx = directional_derivative(model.log_density, kinetic_points, X_AXIS)
    transport = rate.eps * (dg_dt + nodes.vx * dg_dx)
    if config.residual_form == "literal":
        relaxation = rate.mu * (torch.exp(-g) - 1.0)
    else:
        equilibrium = maxwellian_nodes(*model.macro(kinetic_points), nodes)
        relaxation = rate.mu * (equilibrium * torch.exp(-g) - 1.0)
    residual_kinetic = mean_square(transport - relaxation, "residual_kinetic")

    macro_points = points.residual_macro
    _, du_dt = directional_derivative(model.conserved, macro_points, TIME_AXIS)
    _, dflux_dx = directional_derivative(
        lambda p: flux_x_of(torch.exp(model.log_density(p)), nodes),
        macro_points,
        X_AXIS,
    )
    residual_macro = mean_square(du_dt + dflux_dx, "residual_macro")

    moment_points = points.moment
    f = torch.exp(model.log_density(moment_points))
    moment = mean_square(
        conserved_of(f, nodes) - model.conserved(moment_points), "moment"
    )

    return {
        "moment": moment,
        "residual_kinetic": residual_kinetic,
        "residual_macro": residual_macro,
        "boundary": _field_mismatch(model, points.boundary, "boundary"),
        "data": _field_mismatch(model, points.data, "data"),
    }


def _macro_state(raw: tuple[torch.Tensor, ...]) -> MacroState:
    rho, u_x, u_y, temp = (item.numpy() for item in raw)
    return MacroState(rho=rho, u=np.stack([u_x, u_y], axis=-1), temp=temp)


class NonhomSurrogateSampler(SurrogateSampler):
    """Emits ``f = exp(g)`` at cell centres and the macro-net fields."""

    def __init__(
        self,
        model: NonhomSurrogate,
        grid: VelocityGrid,
        spatial: SpatialGrid,
        box: RandomInputSpec,
        config: NonhomSapnnConfig,
        history: LossHistory | None = None,
    ) -> None:
        super().__init__(box, config.horizon)
        self.model = model
        self.grid = grid
        self.spatial = spatial
        self.config = config
        self.history = history

    def evaluate(self, z: ArrayLike, t: float) -> KineticField:
        z = self.check_query(z, t)
        with torch.no_grad():
            f = self.model(query_inputs(self.spatial, t, z))
        return KineticField(
            self.spatial, self.grid, f.numpy().reshape(self.spatial.n_cells, *self.grid.shape)
        )

    def macro(self, z: ArrayLike, t: float) -> MacroState:
        z = self.check_query(z, t)
        with torch.no_grad():
            raw = self.model.macro(query_inputs(self.spatial, t, z))
        return _macro_state(raw)

    def metadata(self) -> dict[str, Any]:
        return {
            "kind": "nonhom",
            "grid": {"extent": self.grid.extent, "n_per_dim": self.grid.n_per_dim},
            "n_cells": self.spatial.n_cells,
            "box": [list(interval) for interval in self.box.box],
            "horizon": self.horizon,
            "config": self.config.model_dump(mode="json"),
        }


def build_nonhom_model(
    config: NonhomSapnnConfig, box: RandomInputSpec
) -> NonhomSurrogate:
    shift, scale = input_normalization(config.horizon, box)
    d_in = 2 + box.dim
    seed = config.schedule.seed
    g_net = build_mlp(
        d_in, config.n_l, config.g_depth, config.g_width, seed, shift, scale
    )
    macro_net = build_mlp(
        d_in, 4, config.macro_depth, config.macro_width, seed + 1, shift, scale
    )
    return NonhomSurrogate(g_net, macro_net)


def train_nonhom(
    config: NonhomSapnnConfig,
    data: FieldTrainingData,
    show_progress: bool = False,
) -> NonhomSurrogateSampler:
    """Jointly train both networks on the weighted five-term risk.

    ``data`` holds BGK (optionally Boltzmann) trajectories of the training
    samples; snapshots after ``data_fraction * horizon`` are ignored.
    """
    if data.kinetic is None or data.grid is None:
        raise InvalidInputError("nonhomogeneous training needs kinetic trajectories")
    if config.n_l != data.grid.n_nodes:
        raise ConfigurationError(
            f"n_l={config.n_l} does not match the {data.grid.n_nodes}-node grid"
        )

    restricted = data.restricted(config.data_fraction * config.horizon)
    collocation = FieldCollocation(restricted, config.horizon)
    nodes = node_tensors(data.grid)
    model = build_nonhom_model(config, data.box)

    def _loss_terms(step: int, generator: torch.Generator) -> dict[str, torch.Tensor]:
        points = NonhomPointSets(
            residual_kinetic=collocation.uniform(generator, config.n_residual_kinetic),
            residual_macro=collocation.uniform(generator, config.n_residual_macro),
            moment=collocation.uniform(generator, config.n_moment),
            boundary=collocation.initial(generator, config.n_boundary),
            data=collocation.data(generator, config.n_data),
        )
        return nonhom_losses(model, config, nodes, points)

    logger.info(
        "Training nonhomogeneous surrogate: eps=%.3g, N_l=%d, %d samples, %d snapshots",
        config.eps,
        config.n_l,
        restricted.n_samples,
        restricted.times.size,
    )
    history = optimize(
        model, _loss_terms, config.schedule, config.weights.as_dict(), show_progress
    )
    return NonhomSurrogateSampler(
        model, data.grid, data.spatial, data.box, config, history
    )
