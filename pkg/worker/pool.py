"""In-process fan-out of independent work units."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """
    Apply ``fn`` to every item and return the results in input order.

    Runs serially when ``workers <= 1``. Work units must not share mutable
    state; the first exception raised by any unit propagates.

    Args:
        fn: Function applied to each item
        items: Work units
        workers: Thread count

    Returns:
        Results in the order of ``items``
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Dispatching {len(items)} work units to {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
