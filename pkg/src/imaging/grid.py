from dataclasses import dataclass
from typing import *

import numpy as np

from ..scene.scene import Roi
from ..utils.error import GeometryError


@dataclass(frozen=True)
class ImageGrid:
    """
    Pixel nodes `origin + (i·δp, j·δp)` for `i < nx`, `j < ny`. Built from a
    rectangle, the node count is rounded up so the last node reaches or
    passes the far edge.
    """

    origin: Tuple[float, float]
    spacing: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.spacing <= 0:
            raise GeometryError(f"Pixel spacing must be > 0, got {self.spacing}.")
        if self.nx < 1 or self.ny < 1:
            raise GeometryError(f"Image grid must have ≥ 1 pixel, got {self.nx}×{self.ny}.")
        if self.origin[1] + (self.ny - 1) * self.spacing >= 0:
            raise GeometryError("Image grid must lie strictly below the reflection plane.")

    @classmethod
    def covering(cls, roi: Roi, spacing: float) -> "ImageGrid":
        if spacing <= 0:
            raise GeometryError(f"Pixel spacing must be > 0, got {spacing}.")
        # tolerate a ratio a hair above an integer from floating point
        nx = int(np.ceil(roi.size[0] / spacing - 1e-9)) + 1
        ny = int(np.ceil(roi.size[1] / spacing - 1e-9)) + 1
        return cls(origin=(roi.x_bounds[0], roi.y_bounds[0]), spacing=spacing, nx=nx, ny=ny)

    @classmethod
    def around(
        cls, center: Tuple[float, float], half_extent: float, spacing: float
    ) -> "ImageGrid":
        """Square grid centred on a node at `center`, reaching `half_extent` each way."""
        half = int(np.ceil(half_extent / spacing - 1e-9))
        return cls(
            origin=(center[0] - half * spacing, center[1] - half * spacing),
            spacing=spacing,
            nx=2 * half + 1,
            ny=2 * half + 1,
        )

    @property
    def x_axis(self) -> np.ndarray:
        return self.origin[0] + np.arange(self.nx) * self.spacing

    @property
    def y_axis(self) -> np.ndarray:
        return self.origin[1] + np.arange(self.ny) * self.spacing

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """(X, Y), each shaped `(ny, nx)`; row index is y, column index is x."""
        return np.meshgrid(self.x_axis, self.y_axis)

    def node(self, row: int, col: int) -> Tuple[float, float]:
        return (float(self.x_axis[col]), float(self.y_axis[row]))

    def nearest_node(self, point: Tuple[float, float]) -> Tuple[int, int]:
        col = int(np.clip(np.rint((point[0] - self.origin[0]) / self.spacing), 0, self.nx - 1))
        row = int(np.clip(np.rint((point[1] - self.origin[1]) / self.spacing), 0, self.ny - 1))
        return row, col


@dataclass(frozen=True)
class ComplexImage:
    values: np.ndarray
    grid: ImageGrid
    sweeps_used: Tuple[int, ...] = ()
    seed: Optional[int] = None
    out_of_window: int = 0

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise GeometryError(
                f"Image of shape {self.values.shape} does not match its grid {self.grid.shape}."
            )

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def scaled(self, factor: complex) -> "ComplexImage":
        return ComplexImage(
            values=self.values * factor,
            grid=self.grid,
            sweeps_used=self.sweeps_used,
            seed=self.seed,
            out_of_window=self.out_of_window,
        )
