"""Test ordered thread mapping and the async progress helpers."""

import asyncio
import threading
import time

import pytest

from src.utils import gather_with_progress, map_with_progress, rate_limited


def test_map_keeps_input_order():
    """Test ordered results for serial and threaded execution."""
    items = list(range(20))

    def _slow_square(value):
        time.sleep(0.001 * (20 - value))
        return value * value

    expected = [value * value for value in items]
    assert map_with_progress(_slow_square, items, jobs=1, disable=True) == expected
    assert map_with_progress(_slow_square, items, jobs=4, disable=True) == expected


def test_map_respects_job_limit():
    """Test that at most ``jobs`` calls run at once."""
    lock = threading.Lock()
    running = 0
    peak = 0

    def _track(value):
        nonlocal running, peak
        with lock:
            running += 1
            peak = max(peak, running)
        time.sleep(0.01)
        with lock:
            running -= 1
        return value

    map_with_progress(_track, list(range(12)), jobs=3, disable=True)
    assert 1 <= peak <= 3


def test_map_propagates_errors():
    """Test that a failing item raises from the mapping call."""

    def _fail_on_three(value):
        if value == 3:
            raise RuntimeError("bad item")
        return value

    with pytest.raises(RuntimeError, match="bad item"):
        map_with_progress(_fail_on_three, list(range(6)), jobs=2, disable=True)


@pytest.mark.asyncio
async def test_gather_with_progress_orders_results():
    """Test that results follow the input order, not completion order."""

    async def _delayed(value):
        await asyncio.sleep(0.001 * (5 - value))
        return value

    results = await gather_with_progress([_delayed(v) for v in range(5)], disable=True)
    assert list(results) == [0, 1, 2, 3, 4]


@pytest.mark.asyncio
async def test_rate_limited_uses_semaphore():
    """Test that the semaphore bounds concurrent coroutines."""
    semaphore = asyncio.Semaphore(2)
    active = 0
    peak = 0

    async def _work():
        nonlocal active, peak
        active += 1
        peak = max(peak, active)
        await asyncio.sleep(0.005)
        active -= 1
        return True

    results = await asyncio.gather(*(rate_limited(_work, semaphore) for _ in range(6)))
    assert all(results)
    assert peak == 2
