"""Process-pool helper with deterministic, ordered results."""

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "EXCLUSION_CODES_WORKERS"


def default_workers() -> int:
    """Worker count from the environment, falling back to a single process."""
    raw = os.getenv(WORKERS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None
) -> List[R]:
    """Map ``func`` over ``items`` keeping input order.

    ``func`` must be a picklable module-level function when ``workers > 1``.
    Results are returned in input order so reductions over them do not
    depend on the worker count.
    """
    items = list(items)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))
