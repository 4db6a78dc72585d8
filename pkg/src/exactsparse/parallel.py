"""Optional process-level parallelism for embarrassingly parallel loops.

The worker count comes from the ``EXACTSPARSE_WORKERS`` environment variable
(default 1, meaning everything runs in-process). Results are always returned
in input order, so parallel and serial runs produce identical output.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

__all__ = ["WORKERS_ENV", "worker_count", "pmap"]

WORKERS_ENV = "EXACTSPARSE_WORKERS"

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1").strip()
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n == 0:
        return os.cpu_count() or 1
    if n < 0:
        raise ValueError(f"{WORKERS_ENV} must be nonnegative")
    return n


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """``[fn(x) for x in items]``, spread over worker processes when configured.

    ``fn`` must be a picklable module-level function. Small inputs run
    in-process regardless of the worker setting.
    """
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
