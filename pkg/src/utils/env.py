import os
from os import environ
from typing import *


def env_with_fallback(*names: List[str]) -> Optional[str]:
    for name in names:
        if env_val := environ.get(name):
            return env_val
    return None


def default_thread_count() -> int:
    """
    Worker count used when neither the config nor the CLI pins one.
    `NLOSVIEW_THREADS` wins, otherwise a single worker: results never depend
    on this value, only wall-clock time does.
    """
    raw = env_with_fallback("NLOSVIEW_THREADS", "OMP_NUM_THREADS")
    if not raw:
        return 1
    try:
        return max(1, min(int(raw), os.cpu_count() or 1))
    except ValueError:
        return 1
