"""Order-preserving block execution.

Work is always cut into the same blocks regardless of the worker count and
results come back in block order, so every reduction done by the caller is
bitwise reproducible.
"""
import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    """Worker cap from LYAPSPEC_THREADS, defaulting to the CPU count."""
    raw = os.environ.get("LYAPSPEC_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 1
        return max(1, n)
    return max(1, os.cpu_count() or 1)


def ordered_map(fn, items, workers=None):
    """Apply fn to items, returning results in input order."""
    items = list(items)
    workers = worker_count() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
