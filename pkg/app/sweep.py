"""Worker pool for sweeps and verification cases.

Results are always returned in input order, whatever the completion order.

Usage:
    from app.sweep import run_ordered

    rows = run_ordered(lambda n: norm_sweep_row("near", n), range(7, 2001, 50))
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import psutil

from config import RUNTIME, get_logger
from config.exceptions import ConfigurationError

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(tasks: Optional[int] = None) -> int:
    """Worker count from HEPTAINV_THREADS, else physical cores, capped by tasks.

    Raises:
        ConfigurationError: If HEPTAINV_THREADS is not a positive integer.
    """
    raw = os.environ.get(RUNTIME.THREADS_ENV_VAR)
    if raw is not None and raw.strip():
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigurationError(
                f"{RUNTIME.THREADS_ENV_VAR} must be a positive integer", {"value": raw}
            ) from None
        if workers < 1:
            raise ConfigurationError(
                f"{RUNTIME.THREADS_ENV_VAR} must be a positive integer", {"value": raw}
            )
    else:
        workers = psutil.cpu_count(logical=False) or 1

    if tasks is not None:
        workers = max(1, min(workers, tasks))
    return workers


def run_ordered(
    fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None
) -> List[R]:
    """Apply fn to every item, in a thread pool when more than one worker is used."""
    items = list(items)
    if not items:
        return []
    workers = workers or resolve_workers(len(items))
    if workers == 1:
        return [fn(item) for item in items]

    logger.debug(f"Running {len(items)} tasks on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
