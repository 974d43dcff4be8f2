"""Shared toolings for the kinetic UQ package and its scripts."""

from .async_utils import gather_with_progress, map_with_progress, rate_limited
from .batching import chunk_slices, create_batches, pairwise_reduce
from .env_vars import RuntimeConfigs
from .logging import RepeatedWarningFilter, set_up_logging
from .pretty_printing import pretty_print


__all__ = [
    "RepeatedWarningFilter",
    "RuntimeConfigs",
    "chunk_slices",
    "create_batches",
    "gather_with_progress",
    "map_with_progress",
    "pairwise_reduce",
    "pretty_print",
    "rate_limited",
    "set_up_logging",
]
