import logging
from threading import Lock
from typing import *

from ..utils.env import default_thread_count

logger = logging.getLogger(__name__)


class RunContext:
    """
    Bundle of properties relevant to one pipeline invocation, shared by every
    stage: the worker cap and the warnings collected along the way.
    """

    def __init__(self, *, threads: Optional[int] = None) -> None:
        self.threads = threads or default_thread_count()
        self.warnings: List[str] = []
        self._lock = Lock()

    def add_warning(self, warning: str, *, stage: str = "run") -> None:
        message = f"[{stage}] {warning}"
        logger.warning(message)
        with self._lock:
            self.warnings.append(message)

    def warnings_for(self, stage: str) -> List[str]:
        prefix = f"[{stage}] "
        return [w for w in self.warnings if w.startswith(prefix)]


def report_warning(context: Optional[RunContext], stage: str, warning: str) -> None:
    """Adds a warning to `context`, or only logs it when running standalone."""
    if context is not None:
        context.add_warning(warning, stage=stage)
    else:
        logging.getLogger(f"nlosview.{stage}").warning(warning)
