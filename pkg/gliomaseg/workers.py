import os
from typing import Optional

from .errors import ConfigError

THREADS_ENV = "GLIOMASEG_THREADS"


def thread_count(default: Optional[int] = None) -> int:
    """worker bound from GLIOMASEG_THREADS, else default, else the cpu count"""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return max(1, default or os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer")
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be positive, got {value}")
    return value
