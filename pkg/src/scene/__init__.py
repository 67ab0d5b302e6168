from .geometry import (
    asymptotic_aperture,
    centered_plane_offset,
    footprint_interval,
    footprint_size_estimate,
    footprint_size_first_order,
    illuminated_set,
    incidence_point,
    required_reflection_angle,
)
from .scene import Roi, Scene, Target

__all__ = [
    "Roi",
    "Scene",
    "Target",
    "asymptotic_aperture",
    "centered_plane_offset",
    "footprint_interval",
    "footprint_size_estimate",
    "footprint_size_first_order",
    "illuminated_set",
    "incidence_point",
    "required_reflection_angle",
]
