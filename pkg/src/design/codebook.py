from dataclasses import dataclass
from typing import *

import numpy as np

from ..utils.error import GeometryError

# Floating point ratios such as 10°/1° must not truncate one angle off the grid.
_CARDINALITY_SLACK = 1e-9


def codebook_cardinality(width: float, step: float) -> int:
    if width == 0:
        return 1
    return int(np.floor(width / step + _CARDINALITY_SLACK)) + 1


def uniform_angles(center: float, width: float, step: float) -> np.ndarray:
    """
    Angles `center − width/2 + k·step` for `k = 0 … K−1`. Generated by index
    so no drift accumulates along the grid.
    """
    if step <= 0:
        raise GeometryError(f"The angular step must be > 0, got {step}.")
    if width < 0:
        raise GeometryError(f"The angular width must be ≥ 0, got {width}.")
    count = codebook_cardinality(width, step)
    angles = (center - width / 2) + np.arange(count) * step
    if np.any(np.abs(angles) >= np.pi / 2):
        raise GeometryError(
            "Codebook leaves the visible half-space: "
            + f"[{np.degrees(angles[0]):.3f}°, {np.degrees(angles[-1]):.3f}°]."
        )
    return angles


@dataclass(frozen=True)
class BsCodebook:
    """Angles the base station sweeps through, one per snapshot of dwell `dwell`."""

    center: float
    width: float
    step: float
    dwell: float
    angles: np.ndarray

    def __len__(self) -> int:
        return len(self.angles)

    @property
    def sweep_duration(self) -> float:
        return len(self.angles) * self.dwell


@dataclass(frozen=True)
class ReflectionCodebook:
    """Reflection angles the modules of the plane may realize."""

    center: float
    width: float
    step: float
    angles: np.ndarray

    def __len__(self) -> int:
        return len(self.angles)

    @property
    def max_abs_angle(self) -> float:
        return float(np.max(np.abs(self.angles)))


def build_bs_codebook(
    center: float, width: float, step: float, dwell: float
) -> BsCodebook:
    if dwell <= 0:
        raise GeometryError(f"The dwell time must be > 0, got {dwell}.")
    return BsCodebook(
        center=center,
        width=width,
        step=step,
        dwell=dwell,
        angles=uniform_angles(center, width, step),
    )


def build_reflection_codebook(
    center: float, width: float, step: float
) -> ReflectionCodebook:
    return ReflectionCodebook(
        center=center,
        width=width,
        step=step,
        angles=uniform_angles(center, width, step),
    )


def reflection_codebook_with_count(
    center: float, width: float, count: int
) -> ReflectionCodebook:
    """The codebook with exactly `count` angles spanning `width` around `center`."""
    if count < 1:
        raise GeometryError(f"A reflection codebook needs ≥ 1 angle, got {count}.")
    if count == 1 or width == 0:
        return build_reflection_codebook(center, 0.0, 1.0)
    return build_reflection_codebook(center, width, width / (count - 1))
