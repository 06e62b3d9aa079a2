"""Counter-based random streams.

Every random draw in the package comes from a Philox stream keyed by
``(seed, tag, chunk)``. Work that is split into chunks therefore produces the
same numbers no matter how many workers process the chunks or in which order.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

import numpy as np

#: rows of a sample matrix drawn from one stream
CHUNK_ROWS = 4096

T = TypeVar("T")


def _tag_key(tag: str) -> int:
    # crc32 is stable across interpreter runs, unlike hash()
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, tag: str, chunk: int = 0) -> np.random.Generator:
    """Return the generator for chunk ``chunk`` of stream ``(seed, tag)``."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence([int(seed), _tag_key(tag), int(chunk)])
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, tag: str, *index: int) -> int:
    """Derive a child seed, e.g. for the i-th rotation trial of a construction."""
    ss = np.random.SeedSequence([int(seed), _tag_key(tag), *map(int, index)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def chunk_bounds(count: int, rows: int = CHUNK_ROWS) -> list[tuple[int, int]]:
    return [(start, min(start + rows, count)) for start in range(0, count, rows)]


def ordered_map(func: Callable[[T], object], items: Iterable[T], workers: int = 1) -> Iterator:
    """``map`` that may run on a thread pool but always yields in input order."""
    if workers <= 1:
        yield from map(func, items)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(func, items)
