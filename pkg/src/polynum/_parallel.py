"""Deterministic chunked map.

Work is split into fixed-size chunks and results are concatenated in chunk
order, so the output (and any float accumulation done over it) is identical
for every worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

DEFAULT_CHUNK = 256


def chunked_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> list[R]:
    data = list(items)
    if workers <= 1 or len(data) <= chunk_size:
        return [fn(x) for x in data]
    chunks = [data[i : i + chunk_size] for i in range(0, len(data), chunk_size)]

    def run(chunk: list[T]) -> list[R]:
        return [fn(x) for x in chunk]

    out: list[R] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(run, chunks):
            out.extend(part)
    return out
