import hashlib
import json
from typing import *

from .serializable import Serializable

if TYPE_CHECKING:
    from ..run.config import RunConfig


def stable_key_for_wire(wire: dict) -> str:
    """
    A stable hash key for any wire-format dictionary. Keys are sorted, so two
    dictionaries with the same content always hash identically.
    """
    return str(
        hashlib.sha256(
            json.dumps(
                wire,
                default=Serializable._primitive_to_wire_format,
                sort_keys=True,
            ).encode("utf-8")
        ).hexdigest()
    )


def stable_key_for_config(config: "RunConfig") -> str:
    """
    A stable hash key for the effective parameters of a run. Output options
    (emitted formats, thread count) are excluded, since they cannot change
    the numbers the run produces.
    """
    wire = config._to_wire_format()
    for key in config.NON_EFFECTIVE_KEYS:
        wire.pop(key, None)
    return stable_key_for_wire(wire)
