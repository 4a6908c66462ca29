"""
Bounded worker pool for per-image work
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> Iterator[R]:
    """
    Apply fn to every item and yield results in input order

    With threads == 1 the work runs inline; otherwise at most ``threads``
    items are in flight at a time.
    """
    if threads <= 1:
        for item in items:
            yield fn(item)
        return

    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending: List = []
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= threads * 2:
                yield pending.pop(0).result()
        for future in pending:
            yield future.result()
