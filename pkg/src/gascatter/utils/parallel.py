"""
Parallel Evaluation Module

Data-parallel helpers shared by sweeps, optimizer seeding and refinement:
- Chunked evaluation over index ranges with dask's threaded scheduler
- Ordered thread-pool map for independent tasks
- Evaluation metrics for debug logging

Worker counts are resolved through :func:`gascatter.config.resolve_threads`,
so ``GASCATTER_THREADS`` caps every pool.
"""

import logging
import threading
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from time import perf_counter
from typing import Any, Callable, Iterable, List, Optional, TypeVar

import dask

from gascatter.config import config, resolve_threads

logger = logging.getLogger(__name__)

T = TypeVar('T')


# =============================================================================
# Metrics
# =============================================================================

@dataclass
class EvaluationMetrics:
    """
    Track parallel evaluation work.

    Attributes
    ----------
    calls : int
        Number of chunked or pooled evaluations
    chunks : int
        Number of chunks or tasks executed
    points : int
        Number of samples evaluated by chunked calls
    total_time : float
        Cumulative wall time spent in evaluations (seconds)
    """
    calls: int = 0
    chunks: int = 0
    points: int = 0
    total_time: float = 0.0

    @property
    def points_per_second(self) -> float:
        return self.points / self.total_time if self.total_time > 0 else 0.0

    def __str__(self) -> str:
        return (
            f"Evaluation Metrics:\n"
            f"  Calls: {self.calls} ({self.chunks} chunks)\n"
            f"  Points: {self.points} ({self.points_per_second:.0f}/s)\n"
            f"  Total Time: {self.total_time:.3f}s"
        )


_metrics = EvaluationMetrics()
_metrics_lock = threading.Lock()


def _record(chunks: int, points: int, elapsed: float) -> None:
    with _metrics_lock:
        _metrics.calls += 1
        _metrics.chunks += chunks
        _metrics.points += points
        _metrics.total_time += elapsed


def get_evaluation_metrics() -> EvaluationMetrics:
    """Get the process-wide evaluation metrics."""
    return _metrics


# =============================================================================
# Chunked Evaluation
# =============================================================================

def chunked_map(
    func: Callable[[slice], T],
    size: int,
    chunk_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> List[T]:
    """
    Evaluate ``func`` on consecutive index ranges covering ``range(size)``.

    Chunks run as ``dask.delayed`` tasks on the threaded scheduler; numpy
    releases the GIL inside the kernels. Results come back in chunk order,
    so the concatenated output never depends on the worker count.

    Parameters
    ----------
    func : callable
        ``func(slice(start, stop))`` returning the chunk result
    size : int
        Total number of samples
    chunk_size : int, optional
        Samples per chunk (default: ``config.sweep_chunk_size``)
    threads : int, optional
        Requested worker count

    Returns
    -------
    list
        One result per chunk, in order

    Examples
    --------
    >>> import numpy as np
    >>> x = np.arange(10.0)
    >>> parts = chunked_map(lambda s: x[s] ** 2, x.size, chunk_size=4)
    >>> [p.size for p in parts]
    [4, 4, 2]
    """
    step = max(1, int(chunk_size or config.sweep_chunk_size))
    slices = [slice(start, min(start + step, size)) for start in range(0, size, step)]
    workers = resolve_threads(threads)

    start_time = perf_counter()
    if len(slices) <= 1 or workers == 1:
        results = [func(s) for s in slices]
    else:
        tasks = [dask.delayed(func, pure=False)(s) for s in slices]
        results = list(dask.compute(*tasks, scheduler='threads', num_workers=workers))
    elapsed = perf_counter() - start_time

    _record(len(slices), size, elapsed)
    logger.debug(f"Evaluated {size} points in {len(slices)} chunk(s) on {workers} thread(s)")
    return results


# =============================================================================
# Thread Pool
# =============================================================================

def pool_map(
    func: Callable[[Any], T],
    items: Iterable[Any],
    threads: Optional[int] = None,
    name_prefix: str = "gascatter_worker",
) -> List[T]:
    """
    Apply ``func`` to every item on a thread pool, keeping input order.

    Parameters
    ----------
    func : callable
        Task function
    items : iterable
        Task inputs
    threads : int, optional
        Requested worker count
    name_prefix : str
        Thread name prefix of the pool

    Returns
    -------
    list
        Results in the order of ``items``
    """
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))

    start_time = perf_counter()
    if workers == 1:
        results = [func(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix=name_prefix) as executor:
            results = list(executor.map(func, items))
    _record(len(items), 0, perf_counter() - start_time)

    logger.debug(f"Ran {len(items)} task(s) on {workers} '{name_prefix}' thread(s)")
    return results
