from __future__ import annotations

import os
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import contextmanager
from typing import TypeVar

THREADS_ENV = "LORENZLAB_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(cli_value: int | None = None, config_value: int | None = None) -> int:
    """CLI flag, then config, then LORENZLAB_THREADS, then 1."""
    for value in (cli_value, config_value):
        if value is not None:
            return max(1, int(value))
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return 1


@contextmanager
def worker_pool(threads: int | None = None) -> Iterator[Executor | None]:
    """Process pool for `threads` > 1, otherwise None (run inline)."""
    count = resolve_threads(threads)
    if count <= 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=count) as executor:
        yield executor


def pool_map(pool: Executor | None, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    # workers must be top-level functions; map keeps input order
    if pool is None:
        return [fn(item) for item in items]
    return list(pool.map(fn, items))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    with worker_pool(threads) as pool:
        return pool_map(pool, fn, items)
