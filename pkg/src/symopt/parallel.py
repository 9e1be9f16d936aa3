"""Deterministic row-chunked kernel application.

Every output row is produced by the same numpy call on the same operands no
matter how many worker threads run, so results are bitwise identical for
any value of the ``SYMOPT_THREADS`` environment variable.
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError

CHUNK_ROWS = 64


def thread_count():
    """Worker threads requested through ``SYMOPT_THREADS`` (default 1)."""
    raw = os.environ.get("SYMOPT_THREADS", "1").strip()
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"SYMOPT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise DomainError("SYMOPT_THREADS must be a positive integer")
    return n


def map_rows(nrows, fn, out):
    """Fill ``out[i0:i1] = fn(i0, i1)`` over fixed chunks of ``CHUNK_ROWS`` rows."""
    bounds = [(i, min(i + CHUNK_ROWS, nrows)) for i in range(0, nrows, CHUNK_ROWS)]

    def work(b):
        out[b[0]:b[1]] = fn(b[0], b[1])

    nthreads = min(thread_count(), len(bounds))
    if nthreads <= 1:
        for b in bounds:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(work, bounds))
    return out


def apply_rows(kernel_rows, values, nrows):
    """Return K @ values where ``kernel_rows(i0, i1)`` builds rows i0..i1 of K.

    ``values`` may be a vector or a matrix whose first axis matches the
    columns of K.
    """
    values = np.asarray(values)
    out = np.empty((nrows,) + values.shape[1:], dtype=complex)
    return map_rows(nrows, lambda i0, i1: kernel_rows(i0, i1) @ values, out)
