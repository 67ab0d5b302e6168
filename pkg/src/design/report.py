import logging
from dataclasses import dataclass, field
from typing import *

import numpy as np
from dataclasses_json import dataclass_json

from ..metasurface.phase_law import PhaseLawParams
from ..metasurface.plan import ModuleLayout
from ..run.context import RunContext, report_warning
from ..scene.geometry import (
    asymptotic_aperture,
    footprint_size_estimate,
    footprint_size_first_order,
    illuminated_set,
)
from ..scene.scene import Roi, Scene
from ..utils.error import GeometryError
from ..utils.serializable import NLOSVIEW_WIRE_VERSION
from .bounds import (
    auto_reflection_center,
    bs_sampling_bound,
    derive_periods_and_module_size,
    reflection_sampling_bound,
    reflection_width_for_roi,
    smallest_reflection_count,
)
from .codebook import (
    BsCodebook,
    ReflectionCodebook,
    build_bs_codebook,
    codebook_cardinality,
    reflection_codebook_with_count,
)

logger = logging.getLogger(__name__)

# Sweep duration T used when the dwell is left to the design.
DEFAULT_SWEEP_DURATION_S = 10e-3
# Relative mismatch above which a Λ_x override is reported against 2A∞.
_PERIOD_MISMATCH = 1e-6


@dataclass_json
@dataclass
class DesignReport:
    """
    Outcome of the codebook and period design. Saved as `design_report.json`,
    so renaming a field is a breaking change of that file.
    """

    lambda_x_m: float
    lambda_tau_s: float
    n_mod: int
    a_inf_m: float
    dtheta_i_max_rad: float
    dtheta_o_max_rad: float
    warnings: List[str] = field(default_factory=list)

    # chosen design
    dtheta_i_rad: float = 0.0
    dtheta_o_rad: float = 0.0
    bs_count: int = 0
    reflection_count: int = 0
    reflection_center_rad: float = 0.0
    reflection_width_rad: float = 0.0
    module_length_m: float = 0.0
    sweep_duration_s: float = 0.0
    plane_length_m: float = 0.0

    # footprint at the sweep centre, exact count and closed-form estimates
    footprint_elements: int = 0
    footprint_elements_first_order: float = 0.0
    footprint_elements_estimate: Optional[float] = None

    _version: int = NLOSVIEW_WIRE_VERSION


class SystemDesign(NamedTuple):
    bs_codebook: BsCodebook
    reflection_codebook: ReflectionCodebook
    law: PhaseLawParams
    layout: ModuleLayout
    report: DesignReport


def design_system(
    scene: Scene,
    *,
    bs_center: float,
    bs_width: float,
    dwell: Optional[float] = None,
    sweep_duration: float = DEFAULT_SWEEP_DURATION_S,
    bs_step: Optional[float] = None,
    reflection_center: Optional[float] = None,
    reflection_width: Optional[float] = None,
    reflection_count: Optional[int] = None,
    spatial_period: Optional[float] = None,
    temporal_period: Optional[float] = None,
    static: bool = False,
    roi: Optional[Roi] = None,
    grid_points: int = 9,
    context: Optional[RunContext] = None,
) -> SystemDesign:
    """
    Derives both codebooks, the space-time periods and the module size from
    the scene. Every `None` argument is derived from the sampling bounds;
    without a `dwell`, the sweep lasts `sweep_duration`.
    Bound violations and inconsistencies become warnings, never errors.
    """
    roi = roi or scene.roi
    warnings: List[str] = []

    def warn(message: str) -> None:
        warnings.append(message)
        report_warning(context, "design", message)

    a_inf = asymptotic_aperture(scene.source_height, bs_center, bs_width)
    if a_inf > scene.plane_length:
        warn(
            f"Asymptotic aperture A∞ = {a_inf:.4f} m exceeds the plane length "
            + f"N·d = {scene.plane_length:.4f} m."
        )

    dtheta_i_max = bs_sampling_bound(
        scene, bs_center, bs_width, roi, grid_points=grid_points
    )
    if np.isinf(dtheta_i_max):
        warn("BS sampling bound is unbounded (zero phase-derivative spread over the ROI).")
    if bs_step is None:
        # an unbounded step keeps only the sweep endpoints
        if np.isfinite(dtheta_i_max):
            bs_step = dtheta_i_max
        else:
            bs_step = bs_width if bs_width > 0 else 1.0
    elif bs_step > dtheta_i_max:
        warn(
            f"BS angular step {np.degrees(bs_step):.4f}° exceeds the sampling bound "
            + f"{np.degrees(dtheta_i_max):.4f}°; the slow-time phase history aliases."
        )
    if dwell is None:
        dwell = sweep_duration / codebook_cardinality(bs_width, bs_step)
    bs_codebook = build_bs_codebook(bs_center, bs_width, bs_step, dwell)

    if reflection_center is None:
        reflection_center = auto_reflection_center(scene, roi)
    if reflection_width is None:
        reflection_width = reflection_width_for_roi(
            scene, bs_center, bs_width, reflection_center, roi
        )
    period_for_count = spatial_period if spatial_period is not None else 2 * a_inf
    if reflection_count is None:
        if period_for_count <= 0:
            raise GeometryError(
                "Cannot size the reflection codebook: Λ_x = 2A∞ = 0. "
                + "Widen the BS sweep or set the spatial period."
            )
        reflection_count = smallest_reflection_count(
            reflection_center,
            reflection_width,
            period_for_count,
            scene.element_spacing,
            scene.wavelength,
        )
    reflection_codebook = reflection_codebook_with_count(
        reflection_center, reflection_width, reflection_count
    )
    count = len(reflection_codebook)

    lambda_x, lambda_tau, n_mod = derive_periods_and_module_size(
        a_inf, count, bs_codebook.sweep_duration, scene.element_spacing, spatial_period
    )
    if spatial_period is not None and (
        a_inf == 0 or abs(spatial_period - 2 * a_inf) > _PERIOD_MISMATCH * 2 * a_inf
    ):
        warn(
            f"Spatial period Λ_x = {spatial_period:.4f} m differs from "
            + f"2A∞ = {2 * a_inf:.4f} m."
        )
    if static:
        lambda_tau = float("inf")
    elif temporal_period is not None:
        lambda_tau = temporal_period
        if temporal_period < bs_codebook.sweep_duration:
            warn(
                f"Temporal period Λ_τ = {temporal_period * 1e3:.3f} ms is shorter "
                + f"than one sweep T = {bs_codebook.sweep_duration * 1e3:.3f} ms."
            )

    dtheta_o_max = reflection_sampling_bound(
        reflection_codebook.angles, n_mod, scene.element_spacing, scene.wavelength
    )
    dtheta_o = reflection_codebook.step if count > 1 else 0.0
    if dtheta_o > dtheta_o_max:
        warn(
            f"Reflection codebook step {np.degrees(dtheta_o):.4f}° exceeds the "
            + f"module-overlap bound {np.degrees(dtheta_o_max):.4f}°."
        )

    law = PhaseLawParams(
        bs_center=bs_center,
        reflection_center=reflection_center,
        reflection_width=reflection_width,
        spatial_period=lambda_x,
        temporal_period=lambda_tau,
        reflection_codebook=reflection_codebook,
        sweep_duration=bs_codebook.sweep_duration,
    )

    beamwidth = float(scene.bs_beamwidth(bs_center))
    try:
        estimate = footprint_size_estimate(
            bs_center, beamwidth, scene.source_height, scene.element_spacing
        )
    except GeometryError:
        estimate = None

    report = DesignReport(
        lambda_x_m=lambda_x,
        lambda_tau_s=lambda_tau,
        n_mod=n_mod,
        a_inf_m=a_inf,
        dtheta_i_max_rad=dtheta_i_max,
        dtheta_o_max_rad=dtheta_o_max,
        warnings=warnings,
        dtheta_i_rad=bs_step if len(bs_codebook) > 1 else 0.0,
        dtheta_o_rad=dtheta_o,
        bs_count=len(bs_codebook),
        reflection_count=count,
        reflection_center_rad=reflection_center,
        reflection_width_rad=reflection_width,
        module_length_m=n_mod * scene.element_spacing,
        sweep_duration_s=bs_codebook.sweep_duration,
        plane_length_m=scene.plane_length,
        footprint_elements=len(illuminated_set(bs_center, beamwidth, scene)),
        footprint_elements_first_order=footprint_size_first_order(
            bs_center, beamwidth, scene.source_height, scene.element_spacing
        ),
        footprint_elements_estimate=estimate,
    )
    logger.info(
        f"Design: |Θᵢ| = {report.bs_count}, |Θₒ| = {count}, N_mod = {n_mod}, "
        + f"Λ_x = {lambda_x:.4f} m, A∞ = {a_inf:.4f} m."
    )
    return SystemDesign(
        bs_codebook=bs_codebook,
        reflection_codebook=reflection_codebook,
        law=law,
        layout=ModuleLayout(scene.element_count, n_mod),
        report=report,
    )
