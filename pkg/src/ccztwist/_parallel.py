"""Order-preserving worker pool shared by the heavy sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_default_jobs = 1


def set_default_jobs(jobs: int | None) -> None:
    """Set the worker count used when callers pass ``jobs=None`` (0 means all cores)."""
    global _default_jobs
    _default_jobs = resolve_jobs(jobs)


def resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        return _default_jobs
    if jobs <= 0:
        return os.cpu_count() or 1
    return jobs


def chunked(seq: Sequence[T], size: int) -> list[Sequence[T]]:
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def pmap(fn: Callable[[T], R], items: Iterable[T], jobs: int | None = None) -> list[R]:
    """``[fn(x) for x in items]``, possibly threaded; result order always matches input order."""
    items = list(items)
    workers = min(resolve_jobs(jobs), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
