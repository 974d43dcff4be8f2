"""Structure-preserving surrogate of space-homogeneous BGK relaxation.

The prediction is ``f = M exp(g)`` with ``M`` the Maxwellian of the initial
state, so it is positive for any parameters. ``g`` solves
``eps dg/dt = mu (exp(-g) - 1)`` at every velocity node, a function of the
node's initial value ``g0 = log(f0 / M)`` and of ``t`` only. The network
therefore takes ``(g0, t)`` pairs and is shared by all nodes and samples.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Literal, Sequence

import numpy as np
import pydantic
import torch
from numpy.typing import ArrayLike
from torch import nn

from ..collision import RelaxationRate
from ..errors import ConfigurationError, InvalidInputError
from ..grid import (
    Distribution,
    FloatArray,
    VelocityGrid,
    conserved_quantities,
    maxwellian,
    moments,
)
from ..nn import DTYPE, LossHistory, Mlp, TrainingSchedule, build_mlp, optimize
from ..nn.autodiff import TensorFn, directional_derivative, mean_square
from ..solvers import HomTrajectory
from ..uq import RandomInputSpec
from .physics import NodeTensors, conserved_of, node_tensors, to_tensor
from .sampler import SurrogateSampler


logger = logging.getLogger(__name__)

G0_AXIS = 0
TIME_AXIS = 1
RATIO_FLOOR = 1e-300

InitialCondition = Literal["soft", "hard"]
Reconstruction = Literal["log_ratio", "direct"]


class HomLossWeights(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    moment: float = pydantic.Field(default=1.0, ge=0)
    residual: float = pydantic.Field(default=1.0, ge=0)
    boundary: float = pydantic.Field(default=10.0, ge=0)
    data: float = pydantic.Field(default=10.0, ge=0)

    @pydantic.model_validator(mode="after")
    def _check_positive(self) -> "HomLossWeights":
        if max(self.as_dict().values()) <= 0:
            raise ValueError("at least one loss weight must be positive")
        return self

    def as_dict(self) -> dict[str, float]:
        return self.model_dump()


class HomSapnnConfig(pydantic.BaseModel):
    """Rate, loss weights, collocation sizes and network of the surrogate.

    ``moment_states`` initial states enter the moment loss at each step,
    each over ``n_moment`` uniform time slices of ``[0, horizon]``.
    Supervision data is restricted to ``t <= data_fraction * horizon``.
    """

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    mu: float = pydantic.Field(default=1.0, gt=0)
    eps: float = pydantic.Field(default=1.0, gt=0)
    horizon: float = pydantic.Field(default=2.0, gt=0)
    data_fraction: float = pydantic.Field(default=0.4, ge=0, le=1)
    weights: HomLossWeights = HomLossWeights()
    n_residual: int = pydantic.Field(default=1024, ge=1)
    n_boundary: int = pydantic.Field(default=512, ge=0)
    n_data: int = pydantic.Field(default=512, ge=0)
    n_moment: int = pydantic.Field(default=8, ge=1)
    moment_states: int = pydantic.Field(default=1, ge=1)
    depth: int = pydantic.Field(default=4, ge=1)
    width: int = pydantic.Field(default=64, ge=1)
    g_floor: float = pydantic.Field(default=-8.0, lt=0)
    initial_condition: InitialCondition = "soft"
    reconstruction: Reconstruction = "log_ratio"
    schedule: TrainingSchedule = TrainingSchedule(steps=20000, learning_rate=1e-3)

    @property
    def rate(self) -> RelaxationRate:
        return RelaxationRate(self.mu, self.eps)


def initial_log_ratio(f0: Distribution, g_floor: float) -> tuple[FloatArray, FloatArray]:
    """``(max(log(f0 / M), g_floor), M)`` on the grid nodes."""
    equilibrium = maxwellian(moments(f0), f0.grid).values
    ratio = np.maximum(f0.values, RATIO_FLOOR) / equilibrium
    return np.maximum(np.log(ratio), g_floor), equilibrium


def reconstruct(
    output: torch.Tensor, equilibrium: torch.Tensor, reconstruction: Reconstruction
) -> torch.Tensor:
    """``f`` from the network output: ``M exp(g)`` or, unconstrained, ``M phi``."""
    if reconstruction == "log_ratio":
        return equilibrium * torch.exp(output)
    return equilibrium * output


class HomSurrogate(nn.Module):
    """Scalar model of ``(g0, t)``.

    With a hard initial condition the output is ``g0 + (t / T) N(g0, t)``
    (``exp(g0) + (t / T) N`` for the direct reconstruction), so it matches
    the initial state exactly.
    """

    def __init__(
        self,
        net: Mlp,
        horizon: float,
        initial_condition: InitialCondition = "soft",
        reconstruction: Reconstruction = "log_ratio",
    ) -> None:
        super().__init__()
        if net.d_in != 2 or net.d_out != 1:
            raise ConfigurationError("homogeneous surrogate needs a 2 -> 1 network")
        self.net = net
        self.horizon = horizon
        self.initial_condition = initial_condition
        self.reconstruction = reconstruction

    def forward(self, inputs: torch.Tensor) -> torch.Tensor:
        out = self.net(inputs)[..., 0]
        if self.initial_condition == "soft":
            return out
        g0 = inputs[..., G0_AXIS]
        base = g0 if self.reconstruction == "log_ratio" else torch.exp(g0)
        return base + inputs[..., TIME_AXIS] / self.horizon * out


@dataclass(frozen=True, eq=False)
class HomPointSet:
    """Inputs ``(N, 2)`` with the node Maxwellian and target ``f`` values."""

    inputs: torch.Tensor
    equilibrium: torch.Tensor
    target: torch.Tensor

    def __len__(self) -> int:
        return int(self.inputs.shape[0])

    @classmethod
    def empty(cls) -> "HomPointSet":
        return cls(
            torch.zeros((0, 2), dtype=DTYPE),
            torch.zeros(0, dtype=DTYPE),
            torch.zeros(0, dtype=DTYPE),
        )


def hom_residual_loss(
    model: TensorFn,
    points: torch.Tensor,
    rate: RelaxationRate,
    reconstruction: Reconstruction = "log_ratio",
) -> torch.Tensor:
    """Mean of ``|eps dg/dt - mu (exp(-g) - 1)|^2`` over ``(g0, t)`` points.

    The direct reconstruction uses ``eps dphi/dt - mu (1 - phi)``.
    """
    output, d_dt = directional_derivative(model, points, TIME_AXIS)
    if reconstruction == "log_ratio":
        relaxation = rate.mu * (torch.exp(-output) - 1.0)
    else:
        relaxation = rate.mu * (1.0 - output)
    return mean_square(rate.eps * d_dt - relaxation, "residual")


def hom_moment_loss(
    model: TensorFn,
    g0: torch.Tensor,
    equilibria: torch.Tensor,
    targets: torch.Tensor,
    times: torch.Tensor,
    nodes: NodeTensors,
    reconstruction: Reconstruction = "log_ratio",
) -> torch.Tensor:
    """Squared conserved-moment mismatch summed over slices, mean over states.

    Parameters
    ----------
    g0, equilibria
        Per-state node values, shape ``(S, N_l)``.
    targets
        ``(mass, momentum_x, momentum_y, energy)`` per state, ``(S, 4)``.
    times
        Time slices ``(N_m,)``.
    """
    n_states, n_nodes = g0.shape
    inputs = torch.stack(
        [
            g0[:, None, :].expand(n_states, times.shape[0], n_nodes),
            times[None, :, None].expand(n_states, times.shape[0], n_nodes),
        ],
        dim=-1,
    )
    f = reconstruct(model(inputs), equilibria[:, None, :], reconstruction)
    mismatch = conserved_of(f, nodes) - targets[:, None, :]
    return mean_square(mismatch.reshape(n_states, -1), "moment") * (
        mismatch.shape[1] * mismatch.shape[2]
    )


def _point_loss(
    model: TensorFn, points: HomPointSet, reconstruction: Reconstruction, term: str
) -> torch.Tensor:
    if len(points) == 0:
        return torch.zeros((), dtype=DTYPE)
    f = reconstruct(model(points.inputs), points.equilibrium, reconstruction)
    return mean_square(f - points.target, term)


def hom_boundary_and_data_loss(
    model: TensorFn,
    boundary: HomPointSet,
    data: HomPointSet,
    reconstruction: Reconstruction = "log_ratio",
) -> tuple[torch.Tensor, torch.Tensor]:
    """Mean squared ``f`` mismatch on the initial and the data points.

    An empty set contributes zero.
    """
    return (
        _point_loss(model, boundary, reconstruction, "boundary"),
        _point_loss(model, data, reconstruction, "data"),
    )


@dataclass(frozen=True, eq=False)
class HomTrainingData:
    """Flattened node data of the training states.

    ``g0``, ``equilibria`` and ``initial`` have shape ``(S, N_l)``;
    ``data_values`` has shape ``(S, n_t, N_l)`` for ``data_times``.
    """

    grid: VelocityGrid
    g0: FloatArray
    equilibria: FloatArray
    initial: FloatArray
    targets: FloatArray
    data_times: FloatArray
    data_values: FloatArray

    @property
    def n_states(self) -> int:
        return int(self.g0.shape[0])


def hom_training_data(
    initial_states: Sequence[Distribution],
    g_floor: float,
    trajectories: Sequence[HomTrajectory] | None = None,
    t_max: float | None = None,
) -> HomTrainingData:
    """Collect node data; trajectory states after ``t_max`` are dropped."""
    if not initial_states:
        raise InvalidInputError("need at least one training state")
    grid = initial_states[0].grid
    pairs = [initial_log_ratio(f0, g_floor) for f0 in initial_states]
    g0 = np.stack([pair[0].ravel() for pair in pairs])
    equilibria = np.stack([pair[1].ravel() for pair in pairs])
    initial = np.stack([f0.values.ravel() for f0 in initial_states])
    targets = np.stack([conserved_quantities(f0) for f0 in initial_states])

    if trajectories:
        if len(trajectories) != len(initial_states):
            raise InvalidInputError("need one trajectory per training state")
        times = trajectories[0].times
        keep = times <= (np.inf if t_max is None else t_max * (1.0 + 1e-12))
        data_times = times[keep]
        data_values = np.stack(
            [traj.values[keep].reshape(int(np.sum(keep)), -1) for traj in trajectories]
        )
    else:
        data_times = np.zeros(0)
        data_values = np.zeros((len(initial_states), 0, grid.n_nodes))

    return HomTrainingData(grid, g0, equilibria, initial, targets, data_times, data_values)


class _HomCollocation:
    """Seeded resampling of residual, initial and data points."""

    def __init__(self, data: HomTrainingData, config: HomSapnnConfig) -> None:
        self.config = config
        self.g0 = to_tensor(data.g0)
        self.equilibria = to_tensor(data.equilibria)
        self.initial = to_tensor(data.initial)
        self.targets = to_tensor(data.targets)
        self.data_times = to_tensor(data.data_times)
        self.data_values = to_tensor(data.data_values)
        self.g0_low = float(np.min(data.g0))
        self.g0_high = float(np.max(data.g0))
        self.moment_times = torch.linspace(0.0, config.horizon, config.n_moment, dtype=DTYPE)

    def _uniform(self, generator: torch.Generator, count: int) -> torch.Tensor:
        return torch.rand(count, generator=generator, dtype=DTYPE)

    def _randint(self, generator: torch.Generator, high: int, count: int) -> torch.Tensor:
        return torch.randint(high, (count,), generator=generator)

    def residual(self, generator: torch.Generator) -> torch.Tensor:
        count = self.config.n_residual
        g0 = self.g0_low + (self.g0_high - self.g0_low) * self._uniform(generator, count)
        t = self.config.horizon * self._uniform(generator, count)
        return torch.stack([g0, t], dim=-1)

    def boundary(self, generator: torch.Generator) -> HomPointSet:
        count = self.config.n_boundary
        if count == 0:
            return HomPointSet.empty()
        states = self._randint(generator, self.g0.shape[0], count)
        nodes = self._randint(generator, self.g0.shape[1], count)
        g0 = self.g0[states, nodes]
        inputs = torch.stack([g0, torch.zeros_like(g0)], dim=-1)
        return HomPointSet(inputs, self.equilibria[states, nodes], self.initial[states, nodes])

    def data(self, generator: torch.Generator) -> HomPointSet:
        count = self.config.n_data
        if count == 0 or self.data_times.numel() == 0:
            return HomPointSet.empty()
        states = self._randint(generator, self.g0.shape[0], count)
        slices = self._randint(generator, self.data_times.shape[0], count)
        nodes = self._randint(generator, self.g0.shape[1], count)
        inputs = torch.stack([self.g0[states, nodes], self.data_times[slices]], dim=-1)
        return HomPointSet(
            inputs,
            self.equilibria[states, nodes],
            self.data_values[states, slices, nodes],
        )

    def moment_states(self, generator: torch.Generator) -> torch.Tensor:
        order = torch.randperm(self.g0.shape[0], generator=generator)
        return order[: self.config.moment_states]


class HomSurrogateSampler(SurrogateSampler):
    """Trained homogeneous surrogate; ``z`` enters through the initial state."""

    def __init__(
        self,
        model: HomSurrogate,
        grid: VelocityGrid,
        initial: Callable[[FloatArray], Distribution],
        box: RandomInputSpec,
        config: HomSapnnConfig,
        history: LossHistory | None = None,
    ) -> None:
        super().__init__(box, config.horizon)
        self.model = model
        self.grid = grid
        self.initial = initial
        self.config = config
        self.history = history

    def predict_values(self, f0: Distribution, times: ArrayLike) -> FloatArray:
        """Predicted node values ``(n_t, n, n)`` from the initial state ``f0``."""
        g0, equilibrium = initial_log_ratio(f0, self.config.g_floor)
        times = to_tensor(np.atleast_1d(times))
        g0_t = to_tensor(g0.ravel())
        inputs = torch.stack(
            [
                g0_t[None, :].expand(times.shape[0], -1),
                times[:, None].expand(-1, g0_t.shape[0]),
            ],
            dim=-1,
        )
        with torch.no_grad():
            f = reconstruct(
                self.model(inputs), to_tensor(equilibrium.ravel()), self.config.reconstruction
            )
        return f.numpy().reshape(times.shape[0], *self.grid.shape)

    def evaluate(self, z: ArrayLike, t: float) -> Distribution:
        z = self.check_query(z, t)
        return Distribution(self.grid, self.predict_values(self.initial(z), [t])[0])

    def trajectory(self, z: ArrayLike, times: ArrayLike) -> HomTrajectory:
        times = np.asarray(times, dtype=np.float64)
        z = self.check_query(z, float(times[-1]))
        return HomTrajectory(times, self.grid, self.predict_values(self.initial(z), times))

    def metadata(self) -> dict[str, Any]:
        return {
            "kind": "hom",
            "grid": {"extent": self.grid.extent, "n_per_dim": self.grid.n_per_dim},
            "box": [list(interval) for interval in self.box.box],
            "horizon": self.horizon,
            "config": self.config.model_dump(mode="json"),
        }


def build_hom_model(config: HomSapnnConfig, data: HomTrainingData) -> HomSurrogate:
    g0_low, g0_high = float(np.min(data.g0)), float(np.max(data.g0))
    net = build_mlp(
        2,
        1,
        config.depth,
        config.width,
        seed=config.schedule.seed,
        input_shift=[0.5 * (g0_low + g0_high), 0.5 * config.horizon],
        input_scale=[max(0.5 * (g0_high - g0_low), 1.0), 0.5 * config.horizon],
    )
    return HomSurrogate(net, config.horizon, config.initial_condition, config.reconstruction)


def train_hom(
    config: HomSapnnConfig,
    data: HomTrainingData,
    initial: Callable[[FloatArray], Distribution],
    box: RandomInputSpec,
    show_progress: bool = False,
) -> HomSurrogateSampler:
    """Minimize ``w_m L_m + w_r L_r + w_b L_b + w_d L_d`` and wrap the result.

    Parameters
    ----------
    config
        Rate, weights, collocation sizes and schedule.
    data
        Training states and optional supervision trajectories.
    initial
        Initial-data family ``z -> f0`` used by the returned sampler.
    box
        Random-input box of the family.
    """
    model = build_hom_model(config, data)
    collocation = _HomCollocation(data, config)
    nodes = node_tensors(data.grid)
    rate = config.rate

    def _loss_terms(step: int, generator: torch.Generator) -> dict[str, torch.Tensor]:
        states = collocation.moment_states(generator)
        boundary, data_loss = hom_boundary_and_data_loss(
            model,
            collocation.boundary(generator),
            collocation.data(generator),
            config.reconstruction,
        )
        return {
            "moment": hom_moment_loss(
                model,
                collocation.g0[states],
                collocation.equilibria[states],
                collocation.targets[states],
                collocation.moment_times,
                nodes,
                config.reconstruction,
            ),
            "residual": hom_residual_loss(
                model, collocation.residual(generator), rate, config.reconstruction
            ),
            "boundary": boundary,
            "data": data_loss,
        }

    logger.info(
        "Training homogeneous surrogate: mu=%.4g eps=%.3g, %d states, %d data slices",
        config.mu,
        config.eps,
        data.n_states,
        data.data_times.size,
    )
    history = optimize(
        model, _loss_terms, config.schedule, config.weights.as_dict(), show_progress
    )
    return HomSurrogateSampler(model, data.grid, initial, box, config, history)
