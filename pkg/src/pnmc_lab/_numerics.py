"""Small numerical kernels shared by several modules."""

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def rk4_step(f, t, y, h):
    """One classical Runge-Kutta step for ``y' = f(t, y)``.

    ``t`` and ``h`` may be arrays broadcasting against the leading axes of
    ``y``; this is how curves are evaluated at many off-node points at once.
    """
    h = np.asarray(h, dtype=float)
    hy = h.reshape(h.shape + (1,) * (np.ndim(y) - h.ndim)) if h.ndim else h
    k1 = f(t, y)
    k2 = f(t + h / 2, y + (hy / 2) * k1)
    k3 = f(t + h / 2, y + (hy / 2) * k2)
    k4 = f(t + h, y + hy * k3)
    return y + (hy / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def observed_order(hs, errors):
    """Least-squares slope of log(error) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    slope, _ = np.polyfit(np.log(hs), np.log(errors), 1)
    return float(slope)


def central_diff(values, h, axis):
    """Second-order central first derivative; the two edge slices are NaN."""
    values = np.asarray(values, dtype=float)
    out = np.full(values.shape, np.nan)
    n = values.shape[axis]
    if n < 3:
        return out
    hi = [slice(None)] * values.ndim
    lo = [slice(None)] * values.ndim
    mid = [slice(None)] * values.ndim
    hi[axis] = slice(2, None)
    lo[axis] = slice(None, -2)
    mid[axis] = slice(1, -1)
    out[tuple(mid)] = (values[tuple(hi)] - values[tuple(lo)]) / (2 * h)
    return out


def thread_cap():
    """Worker cap from PNMC_LAB_THREADS (default 1: run inline)."""
    try:
        return max(1, int(os.environ.get("PNMC_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _concat(parts):
    first = parts[0]
    if first is None:
        return None
    if dataclasses.is_dataclass(first):
        return type(first)(**{f.name: _concat([getattr(p, f.name) for p in parts])
                              for f in dataclasses.fields(first)})
    if isinstance(first, tuple):
        return tuple(_concat(list(items)) for items in zip(*parts))
    return np.concatenate([np.asarray(p) for p in parts], axis=0)


def map_rows(func, U, V, threads=1):
    """Apply ``func(U, V)`` on row blocks in a thread pool and reassemble.

    Results may be arrays, tuples or dataclasses of arrays; block order is
    preserved so the output does not depend on the thread count.
    """
    if threads <= 1 or np.ndim(U) == 0 or len(U) < 2 * threads:
        return func(U, V)
    blocks = np.array_split(np.arange(len(U)), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda idx: func(U[idx], V[idx]), blocks))
    return _concat(parts)
