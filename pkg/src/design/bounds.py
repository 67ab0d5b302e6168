import logging
from typing import *

import numpy as np

from ..scene.geometry import asymptotic_aperture, footprint_interval
from ..scene.scene import Roi, Scene
from ..utils.error import GeometryError
from .codebook import uniform_angles

logger = logging.getLogger(__name__)


def propagation_phase_derivative(theta_i, r, source_height: float, wavelength: float):
    """
    dφ/dθ_i of the two-way propagation phase `φ = (4π/λ0)·(D_i + D_o)` for a
    target at `r`, with the incidence point sliding along the plane as the
    BS steers. Vectorized over `theta_i`, `r[0]` and `r[1]` by broadcasting.
    """
    theta_i = np.asarray(theta_i, dtype=float)
    r_x, r_y = np.asarray(r[0], dtype=float), np.asarray(r[1], dtype=float)
    if np.any(np.abs(theta_i) >= np.pi / 2):
        raise GeometryError(f"θ_i must lie strictly inside (−90°, 90°), got {theta_i}.")
    if np.any(r_y == 0):
        raise GeometryError("Targets on the reflection plane (r_y = 0) are not allowed.")
    lateral = r_x - source_height * np.tan(theta_i)
    bracket = np.sin(theta_i) - lateral / np.hypot(r_y, lateral)
    return 4 * np.pi * source_height / (wavelength * np.cos(theta_i) ** 2) * bracket


def propagation_phase(theta_i, r, source_height: float, wavelength: float):
    """φ(θ_i | r) = (4π/λ0)·(D_i + D_o)."""
    theta_i = np.asarray(theta_i, dtype=float)
    p_x = source_height * np.tan(theta_i)
    d_i = source_height / np.cos(theta_i)
    d_o = np.hypot(np.asarray(r[0]) - p_x, np.asarray(r[1]))
    return 4 * np.pi / wavelength * (d_i + d_o)


def bs_sampling_bound(
    scene: Scene,
    bs_center: float,
    bs_width: float,
    roi: Optional[Roi] = None,
    *,
    grid_points: int = 9,
) -> float:
    """
    Largest BS angular step that keeps the slow-time phase history of every
    ROI point unaliased.

    The derivative is taken at the two sweep edges and its extrema are found
    over the ROI corners plus a `grid_points`×`grid_points` interior grid.
    A single-point ROI has no spread to alias against and yields `inf`.
    """
    roi = roi or scene.roi
    if roi.is_degenerate:
        logger.warning(
            "BS sampling bound is unbounded: the ROI is a single point, "
            + "so there is no derivative spread across it."
        )
        return float("inf")

    points = roi.sample_points(grid_points)
    upper = propagation_phase_derivative(
        bs_center + bs_width / 2,
        (points[:, 0], points[:, 1]),
        scene.source_height,
        scene.wavelength,
    )
    lower = propagation_phase_derivative(
        bs_center - bs_width / 2,
        (points[:, 0], points[:, 1]),
        scene.source_height,
        scene.wavelength,
    )
    spread = abs(float(np.max(upper)) - float(np.min(lower)))
    if spread == 0:
        logger.warning("BS sampling bound is unbounded: zero derivative spread.")
        return float("inf")
    return float(np.pi / spread)


def reflection_sampling_bound(
    reflection_angles, module_size: int, spacing: float, wavelength: float
) -> float:
    """Half the narrowest module beamwidth over the reflection codebook."""
    if module_size < 1:
        raise GeometryError(f"Module size must be ≥ 1 element, got {module_size}.")
    cosines = np.cos(np.asarray(reflection_angles, dtype=float))
    return float(0.5 * np.min(wavelength / (module_size * spacing * cosines)))


def reflection_width_for_roi(
    scene: Scene,
    bs_center: float,
    bs_width: float,
    reflection_center: float,
    roi: Optional[Roi] = None,
) -> float:
    """
    Width Δθ_o of the reflection codebook needed to cover the ROI: twice the
    largest deviation from `reflection_center` among the angles under which
    the ROI corners are seen from the two ends of the swept plane segment.
    """
    angles = reflection_angles_seen_from_segment(scene, bs_center, bs_width, roi)
    return float(2 * np.max(np.abs(angles - reflection_center)))


def reflection_angles_seen_from_segment(
    scene: Scene, bs_center: float, bs_width: float, roi: Optional[Roi] = None
) -> np.ndarray:
    """All corner-to-segment-end angles; the ROI's angular footprint on the plane."""
    roi = roi or scene.roi
    x_ends = np.array(footprint_interval(bs_center, bs_width, scene))
    corners = roi.corners()
    return np.arctan(
        (corners[:, 0][None, :] - x_ends[:, None]) / np.abs(corners[:, 1])[None, :]
    ).ravel()


def auto_reflection_center(scene: Scene, roi: Optional[Roi] = None) -> float:
    """θ̄_o = arctan((r*_x − x0) / |r*_y|), pointing the plane at the ROI centre."""
    roi = roi or scene.roi
    return float(np.arctan((roi.center[0] - scene.plane_offset) / abs(roi.center[1])))


def module_size_for(spatial_period: float, count: int, spacing: float) -> int:
    return int(round(spatial_period / (2 * spacing * count)))


def smallest_reflection_count(
    reflection_center: float,
    reflection_width: float,
    spatial_period: float,
    spacing: float,
    wavelength: float,
    *,
    max_count: int = 4096,
) -> int:
    """
    Smallest codebook size `|Θₒ| ≥ 2` whose step `Δθ_o/(|Θₒ|−1)` satisfies the
    reflection bound for the module size that `|Θₒ|` itself implies.
    """
    if reflection_width == 0:
        return 1
    for count in range(2, max_count + 1):
        module_size = module_size_for(spatial_period, count, spacing)
        if module_size < 1:
            break
        step = reflection_width / (count - 1)
        angles = uniform_angles(reflection_center, reflection_width, step)
        bound = reflection_sampling_bound(angles, module_size, spacing, wavelength)
        if step <= bound:
            return count
    raise GeometryError(
        "No reflection codebook size satisfies the reflection sampling bound "
        + f"for Λ_x = {spatial_period:.4g} m; increase the spatial period."
    )


def derive_periods_and_module_size(
    aperture: float,
    reflection_count: int,
    sweep_duration: float,
    spacing: float,
    spatial_period: Optional[float] = None,
) -> Tuple[float, float, int]:
    """
    (Λ_x, Λ_τ, N_mod) with Λ_x = 2A∞ unless overridden, Λ_τ = |Θₒ|·T and
    N_mod = round(Λ_x / (2·d·|Θₒ|)).
    """
    if reflection_count < 1 or sweep_duration <= 0 or spacing <= 0:
        raise GeometryError(
            "Period derivation needs a positive codebook size, sweep duration and spacing."
        )
    lambda_x = spatial_period if spatial_period is not None else 2 * aperture
    if lambda_x <= 0:
        raise GeometryError(
            f"Spatial period must be > 0, got {lambda_x} (A∞ = {aperture})."
        )
    lambda_tau = reflection_count * sweep_duration
    module_size = module_size_for(lambda_x, reflection_count, spacing)
    if module_size < 1:
        raise GeometryError(
            f"Module size rounds to 0 elements (Λ_x = {lambda_x:.4g} m, "
            + f"|Θₒ| = {reflection_count}, d = {spacing:.4g} m)."
        )
    return lambda_x, lambda_tau, module_size
