from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

from loguru import logger

__all__ = ["logger", "parallel_map"]


Item = TypeVar("Item")
Result = TypeVar("Result")


def parallel_map(func: Callable[[Item], Result], items: Sequence[Item], workers: int = 1) -> list[Result]:
    """Map `func` over `items`, keeping the input order whatever the worker count.

    Args:
        func: a picklable top-level callable.
        items: the work items.
        workers: process count, `1` runs inline.

    Returns:
        The results in the order of `items`.
    """
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"dispatching {len(items)} items to {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
