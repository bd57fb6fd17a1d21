"""app.sweep

Point-partitioned evaluation for grid sweeps.

Chunks are contiguous index ranges and results are reduced in chunk order,
so the worker count changes speed only, never the numbers in a report.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np


def chunks(points: np.ndarray, workers: int) -> list[np.ndarray]:
    n = len(points)
    parts = max(1, min(workers, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [points[bounds[i]:bounds[i + 1]] for i in range(parts)]


def _map(fn: Callable[[np.ndarray], object], points: np.ndarray, workers: int) -> list:
    parts = chunks(points, workers)
    if len(parts) == 1:
        return [fn(parts[0])]
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        return list(pool.map(fn, parts))


def sweep_max(fn: Callable[[np.ndarray], float], points: np.ndarray, workers: int = 1) -> float:
    """max over chunks of fn(chunk)."""
    if len(points) == 0:
        return 0.0
    return float(max(_map(fn, points, workers)))


def sweep_concat(fn: Callable[[np.ndarray], np.ndarray], points: np.ndarray, workers: int = 1, axis: int = 0) -> np.ndarray:
    """Concatenate per-chunk arrays along the point axis."""
    return np.concatenate(_map(fn, points, workers), axis=axis)
