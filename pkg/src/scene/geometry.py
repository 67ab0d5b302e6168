from typing import *

import numpy as np

from ..utils.error import GeometryError
from .scene import Point, Scene

HALF_PI = np.pi / 2


def _check_angle(theta, what: str = "θ_i") -> None:
    if np.any(np.abs(np.asarray(theta)) >= HALF_PI):
        raise GeometryError(f"{what} must lie strictly inside (−90°, 90°), got {theta}.")


def incidence_point(theta_i, scene: Scene) -> Tuple[Any, float]:
    """
    Point `p = (D·tan θ_i, 0)` where the beam centre hits the plane.
    Accepts scalars or arrays of angles; the x coordinate follows the input shape.
    """
    _check_angle(theta_i)
    return (scene.source_height * np.tan(theta_i), 0.0)


def required_reflection_angle(p: Point, r: Point):
    """
    Reflection angle under which `r` is seen from `p`, measured from the plane
    normal pointing into the ROI, positive toward +x. Vectorized over `p[0]`.
    """
    if r[1] == 0:
        raise GeometryError(f"Target at {r} lies on the reflection plane.")
    return np.arctan((r[0] - np.asarray(p[0])) / abs(r[1]))


def incident_distance(theta_i, scene: Scene):
    """D_i = D / cos θ_i, the source to incidence-point range."""
    _check_angle(theta_i)
    return scene.source_height / np.cos(theta_i)


def reflected_distance(p_x, r: Point):
    """D_o, the range from `(p_x, 0)` to `r`. Vectorized over both arguments."""
    return np.hypot(np.asarray(r[0]) - p_x, np.asarray(r[1]))


def footprint_interval(theta_i: float, beamwidth: float, scene: Scene) -> Point:
    """Exact tangent-interval footprint `[D·tan(θ_i − θ_BW/2), D·tan(θ_i + θ_BW/2)]`."""
    lo, hi = theta_i - beamwidth / 2, theta_i + beamwidth / 2
    _check_angle([lo, hi], "beam edge")
    return (scene.source_height * np.tan(lo), scene.source_height * np.tan(hi))


def illuminated_set(theta_i: float, beamwidth: float, scene: Scene) -> np.ndarray:
    """
    Element indices `n` whose positions fall inside the beam footprint, sorted.

    When the footprint is narrower than one element pitch but still lands on
    the plane, the single element nearest its centre is returned. A footprint
    entirely off the plane yields an empty array.
    """
    x_lo, x_hi = footprint_interval(theta_i, beamwidth, scene)
    positions = scene.element_positions
    indices = scene.element_indices
    inside = (positions >= x_lo) & (positions <= x_hi)
    if inside.any():
        return indices[inside]

    half_pitch = scene.element_spacing / 2
    if x_hi < positions[0] - half_pitch or x_lo > positions[-1] + half_pitch:
        return indices[:0]
    center = scene.source_height * np.tan(theta_i)
    return indices[[int(np.argmin(np.abs(positions - center)))]]


def element_index_to_array_index(n, scene: Scene):
    """Maps an element index `n ∈ [−N/2+1, N/2]` to a 0-based array position."""
    return np.asarray(n) + scene.element_count // 2 - 1


def footprint_size_estimate(
    theta_i: float, beamwidth: float, source_height: float, spacing: float
) -> float:
    """
    The closed-form footprint size `D·θ_BW / (d·sin θ_i·cos θ_i)`.

    Only reported alongside the exact count; it diverges at broadside.
    """
    if np.isclose(np.sin(theta_i) * np.cos(theta_i), 0.0, atol=1e-15):
        raise GeometryError(
            "The closed-form footprint estimate is singular at θ_i = 0 and ±90°."
        )
    return float(
        source_height * beamwidth / (spacing * np.sin(theta_i) * np.cos(theta_i))
    )


def footprint_size_first_order(
    theta_i: float, beamwidth: float, source_height: float, spacing: float
) -> float:
    """First-order expansion of the tangent footprint, `D·θ_BW / (d·cos²θ_i)`."""
    _check_angle(theta_i)
    return float(source_height * beamwidth / (spacing * np.cos(theta_i) ** 2))


def asymptotic_aperture(
    source_height: float, bs_center: float, bs_width: float
) -> float:
    """A∞ = D·[tan(θ̄_i + Δθ_i/2) − tan(θ̄_i − Δθ_i/2)]."""
    if abs(bs_center) + bs_width / 2 >= HALF_PI:
        raise GeometryError(
            "The BS sweep must stay inside (−90°, 90°): "
            + f"|θ̄_i| + Δθ_i/2 = {np.degrees(abs(bs_center) + bs_width / 2):.3f}°."
        )
    return float(
        source_height
        * (np.tan(bs_center + bs_width / 2) - np.tan(bs_center - bs_width / 2))
    )


def centered_plane_offset(source_height: float, bs_center: float) -> float:
    """Plane offset `x0 = D·tan θ̄_i` that centres the plane on the sweep."""
    _check_angle(bs_center, "θ̄_i")
    return float(source_height * np.tan(bs_center))
