"""Test batching, chunk slices and the pairwise reduction."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.utils import chunk_slices, create_batches, pairwise_reduce


def test_create_batches():
    """Test batch sizes, the item limit and trailing batches."""
    assert create_batches(list(range(7)), 3) == [[0, 1, 2], [3, 4, 5], [6]]
    assert create_batches(list(range(7)), 3, keep_trailing=False) == [[0, 1, 2], [3, 4, 5]]
    assert create_batches(list(range(7)), 3, limit=4) == [[0, 1, 2], [3]]
    assert create_batches([], 3) == []
    with pytest.raises(ValueError, match="batch_size"):
        create_batches([1], 0)


@given(count=st.integers(0, 300), size=st.integers(1, 70))
def test_chunk_slices_cover_range(count, size):
    """Test that chunks are contiguous, bounded and cover every index."""
    slices = chunk_slices(count, size)
    covered = [index for block in slices for index in range(count)[block]]
    assert covered == list(range(count))
    assert all(0 < block.stop - block.start <= size for block in slices)


def test_pairwise_reduce_tree_shape():
    """Test the balanced bracketing of the reduction."""
    combine = lambda a, b: f"({a}+{b})"  # noqa: E731
    assert pairwise_reduce(["a"], combine) == "a"
    assert pairwise_reduce(["a", "b", "c"], combine) == "((a+b)+c)"
    assert pairwise_reduce(list("abcde"), combine) == "(((a+b)+(c+d))+e)"
    with pytest.raises(ValueError, match="empty"):
        pairwise_reduce([], combine)


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=50))
def test_pairwise_reduce_sums(items):
    """Test that an associative combine gives the plain result."""
    assert pairwise_reduce(items, lambda a, b: a + b) == sum(items)
