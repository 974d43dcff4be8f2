"""Torch versions of the grid quadratures used inside the surrogate losses.

Velocity nodes are flattened row-major (``v_x`` index first) to a trailing
axis of length ``N_l = n_per_dim**2``.
"""

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

from ..grid import GAS_CONSTANT, VELOCITY_DIM, VelocityGrid
from ..nn import DTYPE


@dataclass(frozen=True, eq=False)
class NodeTensors:
    """Flattened velocity nodes and the collision-invariant weights."""

    vx: torch.Tensor
    vy: torch.Tensor
    invariants: torch.Tensor
    cell_area: float

    @property
    def n_nodes(self) -> int:
        return int(self.vx.shape[0])


def node_tensors(grid: VelocityGrid) -> NodeTensors:
    vx = torch.as_tensor(grid.vx.ravel(), dtype=DTYPE)
    vy = torch.as_tensor(grid.vy.ravel(), dtype=DTYPE)
    invariants = torch.stack([torch.ones_like(vx), vx, vy, 0.5 * (vx**2 + vy**2)])
    return NodeTensors(vx, vy, invariants, grid.cell_area)


def conserved_of(f: torch.Tensor, nodes: NodeTensors) -> torch.Tensor:
    """``(mass, momentum_x, momentum_y, energy)`` of ``f`` shaped ``(..., N_l)``."""
    return torch.einsum("...l,ql->...q", f, nodes.invariants) * nodes.cell_area


def flux_x_of(f: torch.Tensor, nodes: NodeTensors) -> torch.Tensor:
    """x-flux ``sum_l v_x f_l phi(v_l) dv`` of the conserved quantities."""
    return conserved_of(f * nodes.vx, nodes)


def macro_from_raw(raw: torch.Tensor) -> tuple[torch.Tensor, ...]:
    """``(rho, u_x, u_y, T)`` from raw outputs with softplus on rho and T."""
    return (
        F.softplus(raw[..., 0]),
        raw[..., 1],
        raw[..., 2],
        F.softplus(raw[..., 3]),
    )


def conserved_from_macro(
    rho: torch.Tensor, u_x: torch.Tensor, u_y: torch.Tensor, temp: torch.Tensor
) -> torch.Tensor:
    energy = 0.5 * rho * (u_x**2 + u_y**2 + VELOCITY_DIM * GAS_CONSTANT * temp)
    return torch.stack([rho, rho * u_x, rho * u_y, energy], dim=-1)


def maxwellian_nodes(
    rho: torch.Tensor,
    u_x: torch.Tensor,
    u_y: torch.Tensor,
    temp: torch.Tensor,
    nodes: NodeTensors,
) -> torch.Tensor:
    """Maxwellian values at every node, shape ``(..., N_l)``."""
    rt = (GAS_CONSTANT * temp)[..., None]
    distance2 = (nodes.vx - u_x[..., None]) ** 2 + (nodes.vy - u_y[..., None]) ** 2
    return rho[..., None] / (2.0 * np.pi * rt) * torch.exp(-distance2 / (2.0 * rt))


def euler_flux(conserved: torch.Tensor, gamma: float) -> torch.Tensor:
    """x-flux of ``(rho, m_x, m_y, E)`` for the gamma-law gas."""
    rho, m_x, m_y, energy = conserved.unbind(-1)
    u_x = m_x / rho
    u_y = m_y / rho
    pressure = (gamma - 1.0) * (energy - 0.5 * rho * (u_x**2 + u_y**2))
    return torch.stack(
        [m_x, m_x * u_x + pressure, m_x * u_y, u_x * (energy + pressure)], dim=-1
    )


def to_tensor(values: np.ndarray | float) -> torch.Tensor:
    return torch.as_tensor(np.asarray(values, dtype=np.float64), dtype=DTYPE)
