"""Monotonic timing in microseconds."""

import time
from typing import Callable, Tuple, TypeVar

T = TypeVar("T")


class Stopwatch:
    """Context manager measuring elapsed wall time on a monotonic clock.

    Example:
        ```python
        with Stopwatch() as watch:
            solve()
        watch.elapsed_us
        ```
    """

    def __init__(self):
        self._start: int = 0
        self._stop: int = 0

    def __enter__(self) -> "Stopwatch":
        self._start = time.perf_counter_ns()
        self._stop = 0
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self._stop = time.perf_counter_ns()

    @property
    def elapsed_us(self) -> float:
        """Elapsed microseconds (up to now while still running)."""
        stop = self._stop or time.perf_counter_ns()
        return (stop - self._start) / 1000.0


def measure(fn: Callable[[], T], warmup: int = 0) -> Tuple[T, float]:
    """Run fn after ``warmup`` untimed calls.

    Args:
        fn: Zero-argument callable
        warmup: Number of untimed calls first

    Returns:
        Result of the timed call and its duration in microseconds
    """
    for _ in range(warmup):
        fn()
    with Stopwatch() as watch:
        result = fn()
    return result, watch.elapsed_us
