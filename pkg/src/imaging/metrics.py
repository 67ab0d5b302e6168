import logging
from dataclasses import dataclass, field
from typing import *

import numpy as np
from dataclasses_json import dataclass_json
from scipy import ndimage

from ..utils.error import GeometryError
from ..utils.serializable import NLOSVIEW_WIRE_VERSION
from .grid import ComplexImage, ImageGrid

logger = logging.getLogger(__name__)

HALF_POWER = 0.5


@dataclass_json
@dataclass
class ImageMetrics:
    """
    Point-target quality of an image. Widths are the −3 dB extent of `|I|²`
    along the grid axes through the peak; PSLR compares the strongest local
    maximum outside the connected −3 dB mainlobe with the peak (≤ 0 dB,
    `-inf` when there is no sidelobe at all).
    """

    peak_x_m: float
    peak_y_m: float
    width_x_m: float
    width_y_m: float
    pslr_db: float
    peak_magnitude: float


def _crossing(power: np.ndarray, peak: int, step: int, half: float) -> float:
    """
    Fractional index where `power` first drops below `half` walking from
    `peak` in direction `step`, by linear interpolation. Runs off the edge
    clamp to the last sample.
    """
    i = peak
    while 0 <= i + step < len(power):
        nxt = i + step
        if power[nxt] < half:
            frac = (power[i] - half) / (power[i] - power[nxt])
            return i + step * frac
        i = nxt
    return float(i)


def half_power_width(profile: np.ndarray, peak: int, spacing: float) -> float:
    power = np.abs(profile) ** 2
    half = HALF_POWER * power[peak]
    left = _crossing(power, peak, -1, half)
    right = _crossing(power, peak, +1, half)
    return max((right - left) * spacing, spacing)


def mainlobe_mask(magnitude: np.ndarray, peak: Tuple[int, int]) -> np.ndarray:
    """Connected region above half power that contains the peak."""
    above = magnitude**2 >= HALF_POWER * magnitude[peak] ** 2
    labels, _ = ndimage.label(above)
    return labels == labels[peak]


def peak_sidelobe_ratio(magnitude: np.ndarray, peak: Tuple[int, int]) -> float:
    local_max = (
        ndimage.maximum_filter(magnitude, size=3, mode="nearest") == magnitude
    ) & (magnitude > 0)
    sidelobes = local_max & ~mainlobe_mask(magnitude, peak)
    if not sidelobes.any():
        return float("-inf")
    return float(20 * np.log10(magnitude[sidelobes].max() / magnitude[peak]))


def image_metrics(image: ComplexImage) -> ImageMetrics:
    magnitude = image.magnitude
    if not np.any(magnitude > 0):
        raise GeometryError("Cannot measure an all-zero image.")
    row, col = np.unravel_index(int(np.argmax(magnitude)), magnitude.shape)
    grid = image.grid
    peak_x, peak_y = grid.node(row, col)
    return ImageMetrics(
        peak_x_m=peak_x,
        peak_y_m=peak_y,
        width_x_m=half_power_width(magnitude[row, :], col, grid.spacing),
        width_y_m=half_power_width(magnitude[:, col], row, grid.spacing),
        pslr_db=peak_sidelobe_ratio(magnitude, (row, col)),
        peak_magnitude=float(magnitude[row, col]),
    )


def width_x_by_sweeps(images: Sequence[ComplexImage]) -> List[float]:
    """Cross-range width after accumulating the first k sweeps, k = 1 … K."""
    widths = []
    running: Optional[np.ndarray] = None
    for image in images:
        running = image.values.copy() if running is None else running + image.values
        widths.append(
            image_metrics(ComplexImage(values=running, grid=image.grid)).width_x_m
        )
    return widths


@dataclass_json
@dataclass
class MetricsDocument:
    """Contents of `metrics.json`."""

    mode: str
    sweeps: int
    seed: int
    metrics: ImageMetrics
    width_x_by_sweeps_m: List[float] = field(default_factory=list)
    grid_origin_m: List[float] = field(default_factory=list)
    pixel_spacing_m: float = 0.0
    grid_shape: List[int] = field(default_factory=list)
    out_of_window_queries: int = 0
    _version: int = NLOSVIEW_WIRE_VERSION
