"""Order-preserving work splitting and per-chunk random streams.

Work is always cut into the same fixed chunks regardless of the number of
threads; each chunk draws from its own Philox stream keyed by
``(seed, chunk index)``.  Thread count therefore never changes results.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

RECORDS_PER_STREAM = 1024
THREADS_ENV = "BELLPURE_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """``None`` reads ``BELLPURE_THREADS`` (default 1); ``0`` means one per CPU."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def map_ordered(fn: Callable[[T], R], items: Iterable[T], threads: int | None = 1) -> list[R]:
    items = list(items)
    threads = resolve_threads(threads)
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def stream(seed: int, index: int) -> np.random.Generator:
    key = np.array([seed % 2**64, index % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def chunk_bounds(total: int, size: int = RECORDS_PER_STREAM) -> list[tuple[int, int, int]]:
    """``(chunk index, start, count)`` covering ``range(total)``."""
    return [(i, start, min(size, total - start)) for i, start in enumerate(range(0, total, size))]
