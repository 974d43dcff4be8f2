"""Training data and collocation for surrogates over ``(x, t, z)``."""

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import torch

from ..errors import InvalidInputError
from ..grid import Distribution, FloatArray, SpatialGrid, VelocityGrid, conserved_quantities
from ..nn import DTYPE
from ..solvers import EulerField, FieldTrajectory, KineticField
from ..uq import RandomInputSpec
from .physics import to_tensor


X_AXIS = 0
TIME_AXIS = 1


@dataclass(frozen=True, eq=False)
class FieldTrainingData:
    """Solver trajectories of the training samples.

    ``conserved`` has shape ``(S, n_t, n_cells, 4)``; ``kinetic``, when
    present, ``(S, n_t, n_cells, N_l)``. ``times[0]`` is the initial time 0.
    """

    spatial: SpatialGrid
    box: RandomInputSpec
    z_values: FloatArray
    times: FloatArray
    conserved: FloatArray
    grid: VelocityGrid | None = None
    kinetic: FloatArray | None = None

    def __post_init__(self) -> None:
        if self.times.size == 0 or self.times[0] != 0.0:
            raise InvalidInputError("training trajectories must start at t = 0")
        if self.conserved.shape[:3] != (
            self.z_values.shape[0],
            self.times.size,
            self.spatial.n_cells,
        ):
            raise InvalidInputError(
                f"conserved data shape {self.conserved.shape} does not match "
                "samples, times and cells"
            )

    @property
    def n_samples(self) -> int:
        return int(self.z_values.shape[0])

    def restricted(self, t_max: float) -> "FieldTrainingData":
        """Drop the snapshots after ``t_max``."""
        keep = self.times <= t_max * (1.0 + 1e-12)
        return replace(
            self,
            times=self.times[keep],
            conserved=self.conserved[:, keep],
            kinetic=None if self.kinetic is None else self.kinetic[:, keep],
        )

    @classmethod
    def from_trajectories(
        cls,
        trajectories: Sequence[FieldTrajectory],
        z_values: FloatArray,
        box: RandomInputSpec,
    ) -> "FieldTrainingData":
        if not trajectories:
            raise InvalidInputError("need at least one trajectory")
        first = trajectories[0].fields[0]
        if isinstance(first, KineticField):
            kinetic = np.stack(
                [
                    np.stack([item.values.reshape(item.spatial.n_cells, -1) for item in traj.fields])
                    for traj in trajectories
                ]
            )
            conserved = np.stack(
                [
                    np.stack(
                        [
                            conserved_quantities(
                                Distribution(item.grid, item.values, item.spatial)
                            )
                            for item in traj.fields
                        ]
                    )
                    for traj in trajectories
                ]
            )
            grid = first.grid
        elif isinstance(first, EulerField):
            kinetic, grid = None, None
            conserved = np.stack(
                [np.stack([item.conserved for item in traj.fields]) for traj in trajectories]
            )
        else:
            raise InvalidInputError(f"unsupported field type {type(first).__name__}")

        return cls(
            spatial=first.spatial,
            box=box,
            z_values=np.asarray(z_values, dtype=np.float64),
            times=trajectories[0].times,
            conserved=conserved,
            grid=grid,
            kinetic=kinetic,
        )


@dataclass(frozen=True, eq=False)
class FieldPointSet:
    """Inputs ``(N, 2 + d_z)`` with optional ``f`` and conserved targets."""

    inputs: torch.Tensor
    f_target: torch.Tensor | None = None
    u_target: torch.Tensor | None = None

    def __len__(self) -> int:
        return int(self.inputs.shape[0])


def input_normalization(
    horizon: float, box: RandomInputSpec
) -> tuple[list[float], list[float]]:
    """Shift and scale mapping ``(x, t, z)`` onto ``[-1, 1]``."""
    half_widths = 0.5 * (box.upper - box.lower)
    shift = [0.5, 0.5 * horizon, *box.center.tolist()]
    scale = [0.5, 0.5 * horizon, *half_widths.tolist()]
    return shift, scale


def query_inputs(spatial: SpatialGrid, t: float, z: FloatArray) -> torch.Tensor:
    """``(x_i, t, z)`` rows for every cell centre."""
    n_cells = spatial.n_cells
    columns = [
        spatial.centers,
        np.full(n_cells, t),
        *(np.full(n_cells, value) for value in np.atleast_1d(z)),
    ]
    return to_tensor(np.stack(columns, axis=-1))


class FieldCollocation:
    """Seeded sampling of ``(x, t, z)`` points and of supervised snapshots."""

    def __init__(self, data: FieldTrainingData, horizon: float) -> None:
        self.horizon = horizon
        self.lower = to_tensor(data.box.lower)
        self.upper = to_tensor(data.box.upper)
        self.centers = to_tensor(data.spatial.centers)
        self.z_values = to_tensor(data.z_values)
        self.times = to_tensor(data.times)
        self.conserved = to_tensor(data.conserved)
        self.kinetic = None if data.kinetic is None else to_tensor(data.kinetic)

    def uniform(self, generator: torch.Generator, count: int) -> torch.Tensor:
        """Uniform points in ``[0, 1] x [0, T] x box``."""
        unit = torch.rand((count, 2 + self.lower.shape[0]), generator=generator, dtype=DTYPE)
        x = unit[:, X_AXIS]
        t = self.horizon * unit[:, TIME_AXIS]
        z = self.lower + (self.upper - self.lower) * unit[:, 2:]
        return torch.cat([x[:, None], t[:, None], z], dim=-1)

    def _snapshots(
        self, generator: torch.Generator, count: int, slices: torch.Tensor
    ) -> FieldPointSet:
        samples = torch.randint(self.z_values.shape[0], (count,), generator=generator)
        cells = torch.randint(self.centers.shape[0], (count,), generator=generator)
        inputs = torch.cat(
            [
                self.centers[cells][:, None],
                self.times[slices][:, None],
                self.z_values[samples],
            ],
            dim=-1,
        )
        return FieldPointSet(
            inputs,
            None if self.kinetic is None else self.kinetic[samples, slices, cells],
            self.conserved[samples, slices, cells],
        )

    def initial(self, generator: torch.Generator, count: int) -> FieldPointSet | None:
        if count == 0:
            return None
        return self._snapshots(generator, count, torch.zeros(count, dtype=torch.long))

    def data(self, generator: torch.Generator, count: int) -> FieldPointSet | None:
        if count == 0 or self.times.shape[0] < 2:
            return None
        slices = torch.randint(1, self.times.shape[0], (count,), generator=generator)
        return self._snapshots(generator, count, slices)
