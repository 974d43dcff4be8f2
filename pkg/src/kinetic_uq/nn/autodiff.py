"""Input derivatives by forward mode and parameter gradients through them.

``input_jacobian`` pushes one tangent per input direction through the network
with ``torch.func.jvp``. The tangents stay on the autograd graph, so a loss
built from them is differentiated with respect to the parameters by an
ordinary backward pass (forward-over-reverse).
"""

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import torch
from torch import nn

from ..errors import DimensionMismatchError, NonFiniteLossError


TensorFn = Callable[[torch.Tensor], torch.Tensor]
LossTerms = Mapping[str, torch.Tensor]


def directional_derivative(
    fn: TensorFn, inputs: torch.Tensor, direction: int
) -> tuple[torch.Tensor, torch.Tensor]:
    """``(fn(inputs), d fn / d inputs[..., direction])`` in one forward pass."""
    if not 0 <= direction < inputs.shape[-1]:
        raise DimensionMismatchError(
            f"direction {direction} outside {inputs.shape[-1]} input features"
        )
    tangent = torch.zeros_like(inputs)
    tangent[..., direction] = 1.0
    output, derivative = torch.func.jvp(fn, (inputs,), (tangent,))
    return output, derivative


def input_jacobian(
    fn: TensorFn, inputs: torch.Tensor, directions: Sequence[int] | None = None
) -> torch.Tensor:
    """Jacobian of ``fn`` with respect to its inputs, batched over leading axes.

    Returns
    -------
    torch.Tensor
        Shape ``(..., d_out, len(directions))``; all input directions when
        ``directions`` is None.
    """
    directions = range(inputs.shape[-1]) if directions is None else directions
    columns = [directional_derivative(fn, inputs, k)[1] for k in directions]
    return torch.stack(columns, dim=-1)


def mean_square(residual: torch.Tensor, term: str) -> torch.Tensor:
    """Mean of ``residual**2`` over all entries, checked for finiteness.

    Raises
    ------
    NonFiniteLossError
        Naming ``term`` and the first collocation point (leading index)
        with a non-finite residual.
    """
    if residual.numel() == 0:
        return torch.zeros((), dtype=residual.dtype)
    finite = torch.isfinite(residual.detach())
    if not bool(torch.all(finite)):
        per_point = finite.reshape(finite.shape[0], -1).all(dim=1)
        index = int(torch.nonzero(~per_point)[0, 0])
        raise NonFiniteLossError(term, index)
    return torch.mean(residual**2)


@dataclass(frozen=True)
class GradientReport:
    """Loss value, flat parameter gradient and per-term values."""

    loss: float
    gradient: np.ndarray
    terms: dict[str, float] = field(default_factory=dict)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.gradient))

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.gradient))) if self.gradient.size else 0.0


def weighted_total(
    terms: LossTerms, weights: Mapping[str, float] | None = None
) -> torch.Tensor:
    """``sum_k w_k L_k``; terms without a weight count once."""
    weights = weights or {}
    total = None
    for name, value in terms.items():
        if not bool(torch.isfinite(value.detach())):
            raise NonFiniteLossError(name)
        weighted = weights.get(name, 1.0) * value
        total = weighted if total is None else total + weighted
    if total is None:
        raise ValueError("no loss terms to combine")
    return total


def loss_gradient(
    module: nn.Module,
    loss_evaluator: Callable[[], LossTerms],
    weights: Mapping[str, float] | None = None,
) -> GradientReport:
    """Exact gradient of the weighted loss with respect to every parameter.

    ``loss_evaluator`` may use ``input_jacobian`` on ``module``; parameters
    that do not influence the loss get zero gradient.
    """
    module.zero_grad(set_to_none=True)
    terms = loss_evaluator()
    total = weighted_total(terms, weights)

    parameters = [p for p in module.parameters() if p.requires_grad]
    if total.requires_grad:
        grads = torch.autograd.grad(total, parameters, allow_unused=True)
    else:
        grads = (None,) * len(parameters)
    flat = torch.cat(
        [
            (torch.zeros_like(p) if g is None else g).reshape(-1)
            for p, g in zip(parameters, grads, strict=True)
        ]
    )
    return GradientReport(
        loss=float(total.detach()),
        gradient=flat.detach().cpu().numpy(),
        terms={name: float(value.detach()) for name, value in terms.items()},
    )
