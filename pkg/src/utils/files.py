import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import *


@contextmanager
def atomic_writer(path: Union[str, Path], mode: str = "wb") -> Iterator[IO]:
    """
    Opens a temporary sibling of `path` for writing and renames it over
    `path` once the block exits cleanly. On error the temporary file is
    removed, so `path` is either fully written or left untouched.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        encoding = None if "b" in mode else "utf-8"
        newline = None if "b" in mode else ""
        with os.fdopen(fd, mode, encoding=encoding, newline=newline) as handle:
            yield handle
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise

