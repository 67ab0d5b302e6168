import warnings
from contextlib import contextmanager
from copy import deepcopy

import numpy as np


@contextmanager
def silenced_numeric_warnings():
    """
    Silences floating point warnings which are expected and handled by the
    caller, such as `log10(0)` when converting a magnitude to decibels before
    clipping it to a floor. This is not thread-safe, but it will restore any
    original warnings filters when the context manager is exited.
    """
    og_filters = deepcopy(warnings.filters)
    try:
        warnings.filterwarnings("ignore", category=RuntimeWarning)
        with np.errstate(divide="ignore", invalid="ignore"):
            yield
    finally:
        warnings.filters[:] = og_filters
