"""Thread-count control for sweeps, read from ``QCORR_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from .errors import InvariantError

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Value of ``QCORR_THREADS`` (a positive integer), or the CPU count when unset."""
    raw = os.environ.get("QCORR_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise InvariantError(f"QCORR_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvariantError(f"QCORR_THREADS must be a positive integer, got {raw!r}")
    return n


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Ordered map over a thread pool capped at :func:`worker_count` workers."""
    items = list(items)
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
