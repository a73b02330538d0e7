from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from app.config import config


T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """Apply fn to every item, results in input order.

    Worker count defaults to TGRAPH_THREADS; one worker is a plain loop.
    """
    items = list(items)
    workers = threads if threads is not None else config.runtime.threads
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as ex:
        futures = [ex.submit(fn, item) for item in items]
        return [future.result() for future in futures]
