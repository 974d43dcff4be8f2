"""Adam training loop with loss history and divergence detection."""

import logging
from pathlib import Path
from typing import Callable, Mapping

import pandas as pd
import pydantic
import torch
from rich.progress import track
from torch import nn

from ..errors import TrainingDivergenceError
from .autodiff import LossTerms, weighted_total


logger = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e6
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8

LossEvaluator = Callable[[int, torch.Generator], LossTerms]


class TrainingSchedule(pydantic.BaseModel):
    """Step count, learning-rate schedule, batch size and logging cadence.

    ``lr_decay`` multiplies the learning rate after every step.
    ``batch_size`` of None means full-batch collocation.
    """

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    steps: int = pydantic.Field(default=2000, ge=1)
    learning_rate: float = pydantic.Field(default=1e-3, gt=0)
    lr_decay: float = pydantic.Field(default=1.0, gt=0, le=1)
    batch_size: int | None = pydantic.Field(default=None, ge=1)
    log_every: int = pydantic.Field(default=100, ge=1)
    seed: int = 0


class LossHistory:
    """Rows of ``(step, total, *terms)`` recorded during training."""

    def __init__(self) -> None:
        self.rows: list[dict[str, float]] = []

    def record(self, step: int, total: float, terms: Mapping[str, float]) -> None:
        self.rows.append({"step": step, "total": total, **terms})

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def totals(self) -> list[float]:
        return [row["total"] for row in self.rows]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def write_csv(self, path: Path) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.10e")


def optimize(
    module: nn.Module,
    loss_evaluator: LossEvaluator,
    schedule: TrainingSchedule,
    weights: Mapping[str, float] | None = None,
    show_progress: bool = False,
) -> LossHistory:
    """Train ``module`` in place with Adam.

    Parameters
    ----------
    module
        Network(s) whose parameters are optimized.
    loss_evaluator
        ``(step, generator) -> {term: loss}``; the generator is seeded from
        ``schedule.seed`` and drives any collocation resampling.
    schedule
        Steps and learning-rate schedule.
    weights
        Per-term weights of the total loss.

    Raises
    ------
    TrainingDivergenceError
        When the total exceeds ``1e6`` times its initial value.
    NonFiniteLossError
        When a loss term is NaN or infinite.
    """
    generator = torch.Generator().manual_seed(schedule.seed)
    optimizer = torch.optim.Adam(
        module.parameters(),
        lr=schedule.learning_rate,
        betas=ADAM_BETAS,
        eps=ADAM_EPS,
    )
    scheduler = torch.optim.lr_scheduler.ExponentialLR(
        optimizer, gamma=schedule.lr_decay
    )
    history = LossHistory()
    initial: float | None = None

    for step in track(
        range(schedule.steps), description="Training", disable=not show_progress
    ):
        optimizer.zero_grad(set_to_none=True)
        terms = loss_evaluator(step, generator)
        total = weighted_total(terms, weights)
        value = float(total.detach())
        initial = value if initial is None else initial

        is_last = step == schedule.steps - 1
        if step % schedule.log_every == 0 or is_last:
            history.record(
                step, value, {k: float(v.detach()) for k, v in terms.items()}
            )
            logger.debug("step %d loss %.6e", step, value)

        if value > DIVERGENCE_FACTOR * max(initial, 1e-300):
            history.record(
                step, value, {k: float(v.detach()) for k, v in terms.items()}
            )
            raise TrainingDivergenceError(
                f"loss {value:.3e} at step {step} exceeds "
                f"{DIVERGENCE_FACTOR:.0e} x initial {initial:.3e}",
                history,
            )

        total.backward()
        optimizer.step()
        scheduler.step()

    logger.info(
        "Training finished after %d steps, final loss %.4e",
        schedule.steps,
        history.totals[-1],
    )
    return history
