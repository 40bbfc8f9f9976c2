"""Worker-thread cap honoring the BAKERLAB_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Requested worker threads; defaults to 1 (fully serial, deterministic)."""
    raw = os.environ.get("BAKERLAB_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"BAKERLAB_THREADS={raw!r} is not an integer") from exc
    return max(1, min(n, os.cpu_count() or 1))


def map_ordered(fn, items):
    """Map preserving input order; threaded only when the cap allows it."""
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
