from typing import *


class UserConfigError(Exception):
    """
    An error found while reading or validating a run configuration.

    These error instances are considered "user-friendly". They can be understood
    by users unfamiliar with the simulator internals, and they point at the
    config line to fix.
    """

    def __init__(
        self,
        message: str,
        *,
        path: Optional[str] = None,
        line: Optional[int] = None,
        keys: Sequence[str] = (),
    ) -> None:
        super().__init__(message)
        self.message = message
        self.path = path
        self.line = line
        # config keys the error is about, used to locate it in the file
        self.keys = tuple(keys)

    def __str__(self) -> str:
        location = self.path or "<config>"
        if self.line is not None:
            location = f"{location}:{self.line}"
        return f"{location}: {self.message}"


class GeometryError(ValueError):
    """
    A geometric or numerical precondition was violated: an angle at ±90°,
    a target on the plane, a codebook leaving the visible half-space, or a
    configuration that leaves nothing to compute.
    """


class StrictModeError(Exception):
    """
    Raised at the end of a run in strict mode when any design or simulation
    warning was collected.
    """

    def __init__(self, warnings: List[str]) -> None:
        super().__init__(
            "Strict mode: the run produced warnings.\n"
            + "\n".join(f"  - {w}" for w in warnings)
        )
        self.warnings = warnings
