"""
Ordered thread-pool map used by the blocked distance kernels and the per-radius builds.
"""

import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Optional, TypeVar

from ballmapper.config import resolve_worker_count

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def block_ranges(n: int, block: int) -> list[tuple[int, int]]:
    """Split ``range(n)`` into consecutive half-open ``(start, stop)`` blocks."""
    return [(start, min(start + block, n)) for start in range(0, n, block)]


def map_ordered(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
) -> list[R]:
    """Apply ``func`` to every item, concurrently, returning results in input order.

    A worker exception is logged with the item index and re-raised; partial results are
    never returned. With one worker (or one item) everything runs inline.
    """
    items: Sequence[T] = list(items)
    max_workers = resolve_worker_count(workers)

    if max_workers == 1 or len(items) <= 1:
        return [func(item) for item in items]

    results: list[tuple[int, R]] = []
    with ThreadPoolExecutor(max_workers=min(max_workers, len(items))) as executor:
        future_map = {executor.submit(func, item): i for i, item in enumerate(items)}

        for future in as_completed(future_map):
            idx = future_map[future]
            try:
                results.append((idx, future.result()))
            except Exception as exc:
                logger.error("Worker failed for block %d: %s", idx, exc)
                raise

    # Restore original order
    results.sort(key=lambda x: x[0])
    return [r[1] for r in results]
