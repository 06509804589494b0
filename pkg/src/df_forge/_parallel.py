"""Ordered chunked parallel map used by the scans."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def thread_count(threads=None) -> int:
    if threads is None:
        threads = os.environ.get("DF_FORGE_THREADS", "1")
    try:
        n = int(threads)
    except (TypeError, ValueError):
        n = 1
    return max(1, n)


def chunked_map(fn, n: int, threads=None, chunk: int = 4096):
    """Apply ``fn(sl)`` to consecutive slices covering range(n); results in slice order.

    The split depends only on ``n`` and ``chunk`` so the output is identical
    for any thread count.
    """
    slices = [slice(i, min(n, i + chunk)) for i in range(0, n, chunk)]
    k = thread_count(threads)
    if k == 1 or len(slices) <= 1:
        return [fn(s) for s in slices]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, slices))


def concat(parts, axis=0):
    parts = [np.asarray(p) for p in parts]
    if not parts:
        return np.zeros(0)
    return np.concatenate(parts, axis=axis)
