"""Bounded, order-preserving task mapping for block fits and Monte-Carlo runs.

Threads are enough here: the heavy work happens inside BLAS/LAPACK calls,
which release the GIL.  Results come back in submission order, so the
worker count never changes any output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def default_workers() -> int:
    return os.cpu_count() or 1


def parallel_map(fn, items, workers=None):
    items = list(items)
    if workers is None:
        workers = default_workers()
    workers = max(1, min(int(workers), len(items) or 1))
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
