from dataclasses import dataclass, field, replace
from typing import *

import numpy as np
from scipy.constants import speed_of_light

from ..utils.error import GeometryError
from ..utils.serializable import Serializable

Point = Tuple[float, float]


@dataclass(frozen=True)
class Target(Serializable):
    """
    A point scatterer in the region of interest.

    `position` is `(r_x, r_y)` in meters with `r_y < 0` (behind the plane, as
    seen from the base station). `reflectivity` is the complex, unitless Γ.
    """

    position: Point
    reflectivity: complex = 1.0

    def __post_init__(self):
        if self.position[1] >= 0:
            raise GeometryError(
                f"Target at {self.position} must lie below the reflection plane (r_y < 0)."
            )

    # --- Serialization ---

    def _to_wire_format(self) -> dict:
        return {
            "position": list(self.position),
            "reflectivity": self._primitive_to_wire_format(complex(self.reflectivity)),
        }

    @classmethod
    def _from_wire_format(cls, wire: dict) -> "Target":
        return Target(
            position=tuple(wire["position"]),
            reflectivity=cls._primitive_from_wire_format(wire["reflectivity"]),
        )


@dataclass(frozen=True)
class Roi:
    """Axis-aligned rectangular region of interest."""

    center: Point
    size: Point

    def __post_init__(self):
        if self.size[0] < 0 or self.size[1] < 0:
            raise GeometryError(f"ROI extents must be non-negative, got {self.size}.")
        if self.center[1] + self.size[1] / 2 >= 0:
            raise GeometryError(
                "The ROI must lie strictly on the opposite side of the plane "
                + f"from the source (center {self.center}, size {self.size})."
            )

    @property
    def x_bounds(self) -> Point:
        return (self.center[0] - self.size[0] / 2, self.center[0] + self.size[0] / 2)

    @property
    def y_bounds(self) -> Point:
        return (self.center[1] - self.size[1] / 2, self.center[1] + self.size[1] / 2)

    @property
    def is_degenerate(self) -> bool:
        return self.size[0] == 0 and self.size[1] == 0

    def corners(self) -> np.ndarray:
        (x_lo, x_hi), (y_lo, y_hi) = self.x_bounds, self.y_bounds
        return np.array([[x_lo, y_lo], [x_hi, y_lo], [x_lo, y_hi], [x_hi, y_hi]])

    def sample_points(self, n: int = 9) -> np.ndarray:
        """Corners plus an `n`×`n` grid spanning the rectangle, as an (K, 2) array."""
        xs = np.linspace(*self.x_bounds, n)
        ys = np.linspace(*self.y_bounds, n)
        gx, gy = np.meshgrid(xs, ys)
        grid = np.column_stack([gx.ravel(), gy.ravel()])
        return np.unique(np.vstack([self.corners(), grid]), axis=0)

    def contains(self, point: Point, *, tol: float = 1e-9) -> bool:
        (x_lo, x_hi), (y_lo, y_hi) = self.x_bounds, self.y_bounds
        return (x_lo - tol <= point[0] <= x_hi + tol) and (
            y_lo - tol <= point[1] <= y_hi + tol
        )


@dataclass(frozen=True)
class Scene(Serializable):
    """
    Geometry of one acquisition: base station at `(0, D)`, a reflection plane
    of `N` elements along `y = 0`, and a region of interest behind it.

    Element `n` sits at `x_n = x0 + n·d` for `n = −N/2+1 … N/2`. All fields are
    SI (meters, hertz); conversion from degrees and GHz happens in the config.
    """

    source_height: float
    element_count: int
    element_spacing: float
    plane_offset: float
    roi: Roi
    carrier_frequency: float
    bandwidth: float
    bs_aperture: float
    targets: Tuple[Target, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.source_height <= 0:
            raise GeometryError(f"Source height D must be > 0, got {self.source_height}.")
        if self.element_spacing <= 0:
            raise GeometryError(
                f"Element spacing d must be > 0, got {self.element_spacing}."
            )
        if self.element_count <= 0 or self.element_count % 2:
            raise GeometryError(
                f"Element count N must be a positive even integer, got {self.element_count}."
            )
        if self.bandwidth <= 0:
            raise GeometryError(f"Bandwidth B must be > 0, got {self.bandwidth}.")
        if self.carrier_frequency <= 0:
            raise GeometryError(
                f"Carrier frequency must be > 0, got {self.carrier_frequency}."
            )
        if self.bs_aperture <= 0:
            raise GeometryError(f"BS aperture must be > 0, got {self.bs_aperture}.")
        for target in self.targets:
            if not self.roi.contains(target.position):
                raise GeometryError(
                    f"Target at {target.position} lies outside the ROI "
                    + f"x∈{self.roi.x_bounds}, y∈{self.roi.y_bounds}."
                )

    # --- Derived quantities ---

    @property
    def wavelength(self) -> float:
        return speed_of_light / self.carrier_frequency

    @property
    def source(self) -> Point:
        return (0.0, self.source_height)

    @property
    def plane_length(self) -> float:
        return self.element_count * self.element_spacing

    @property
    def element_indices(self) -> np.ndarray:
        half = self.element_count // 2
        return np.arange(-half + 1, half + 1)

    @property
    def element_positions(self) -> np.ndarray:
        return self.plane_offset + self.element_indices * self.element_spacing

    def bs_beamwidth(self, theta_i) -> np.ndarray:
        """θ_BW(θ_i) ≈ λ0 / (A·cos θ_i)."""
        return self.wavelength / (self.bs_aperture * np.cos(theta_i))

    def with_targets(self, targets: Iterable[Target]) -> "Scene":
        return replace(self, targets=tuple(targets))

    def with_roi(self, roi: Roi) -> "Scene":
        return replace(self, roi=roi, targets=())

    # --- Serialization ---

    def _to_wire_format(self) -> dict:
        return {
            "sourceHeight": self.source_height,
            "elementCount": self.element_count,
            "elementSpacing": self.element_spacing,
            "planeOffset": self.plane_offset,
            "roi": {"center": list(self.roi.center), "size": list(self.roi.size)},
            "carrierFrequency": self.carrier_frequency,
            "bandwidth": self.bandwidth,
            "bsAperture": self.bs_aperture,
            "targets": [t._to_wire_format() for t in self.targets],
        }

    @classmethod
    def _from_wire_format(cls, wire: dict) -> "Scene":
        return Scene(
            source_height=wire["sourceHeight"],
            element_count=wire["elementCount"],
            element_spacing=wire["elementSpacing"],
            plane_offset=wire["planeOffset"],
            roi=Roi(
                center=tuple(wire["roi"]["center"]), size=tuple(wire["roi"]["size"])
            ),
            carrier_frequency=wire["carrierFrequency"],
            bandwidth=wire["bandwidth"],
            bs_aperture=wire["bsAperture"],
            targets=tuple(Target._from_wire_format(t) for t in wire["targets"]),
        )
