"""Utils for splitting sample sweeps into fixed chunks and reducing them."""

from typing import Callable, Sequence, TypeVar


V = TypeVar("V")


def create_batches(
    items: Sequence[V],
    batch_size: int,
    limit: int | None = None,
    keep_trailing: bool = True,
) -> list[list[V]]:
    """Transform the sequence of items into batches.

    Params:
        limit: number of items to include in total
        keep_trailing: if False, the last few items that
            does not fit in a full batch will not be returned.

    Return:
        List of batches.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be positive, got {batch_size}")

    batches: list[list[V]] = [[]]
    for _index, _item in enumerate(items):
        if (limit is not None) and (_index >= limit):
            break

        batches[-1].append(_item)
        if len(batches[-1]) == batch_size:
            batches.append([])

    # Discard trailing batch if empty or required
    if (len(batches[-1]) == 0) or (
        (not keep_trailing) and (len(batches[-1]) < batch_size)
    ):
        batches.pop(-1)

    return batches


def chunk_slices(count: int, chunk_size: int) -> list[slice]:
    """Return contiguous slices covering ``range(count)``.

    Boundaries depend only on ``count`` and ``chunk_size``.
    """
    return [
        slice(batch[0], batch[-1] + 1)
        for batch in create_batches(range(count), chunk_size)
    ]


def pairwise_reduce(items: Sequence[V], combine: Callable[[V, V], V]) -> V:
    """Reduce ``items`` with a balanced binary tree of ``combine`` calls.

    The tree shape depends only on ``len(items)``, so floating-point results
    are reproducible for a fixed item order.
    """
    if len(items) == 0:
        raise ValueError("Cannot reduce an empty sequence.")

    level = list(items)
    while len(level) > 1:
        paired = [
            combine(level[index], level[index + 1])
            for index in range(0, len(level) - 1, 2)
        ]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired

    return level[0]
