import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import *

import numpy as np
from dataclasses_json import dataclass_json
from scipy.constants import speed_of_light

from ..design.report import DesignReport, SystemDesign, design_system
from ..forward.acquisition import EchoCube, NoiseSpec, simulate_acquisition
from ..forward.cube_io import write_cube
from ..forward.echo import RadiometricParams
from ..forward.schedule import SweepSchedule, build_schedule
from ..imaging.backprojection import accumulate_sweeps, backproject_sweeps
from ..imaging.export import write_image_csv, write_image_pgm, write_json_document
from ..imaging.grid import ComplexImage, ImageGrid
from ..imaging.metrics import ImageMetrics, MetricsDocument, image_metrics, width_x_by_sweeps
from ..imaging.mirror import beam_scan_sweeps, mirror_baseline_plan
from ..metasurface.plan import PhasePlan, build_phase_plan
from ..scene.geometry import centered_plane_offset
from ..scene.scene import Roi, Scene, Target
from ..utils.error import StrictModeError
from ..utils.files import atomic_writer
from ..utils.serializable import NLOSVIEW_WIRE_VERSION
from ..utils.stable_key import stable_key_for_config
from ..utils.version import dependency_versions
from .config import AUTO, RunConfig
from .context import RunContext

logger = logging.getLogger(__name__)

DESIGN_REPORT = "design_report.json"
METRICS = "metrics.json"
IMAGE_CSV = "image.csv"
IMAGE_PGM = "image.pgm"
PHASE_PLAN = "phase_plan.csv"
ECHO_CUBE = "echo_cube.bin"
MANIFEST = "manifest.json"


# --- Config → domain objects ---


def _auto(value, fallback):
    return fallback if value == AUTO else value


def square_outline(center_x: float, center_y: float, side: float, spacing: float) -> np.ndarray:
    """Points along the outline of an axis-aligned square, corners included."""
    per_side = max(1, int(round(side / spacing)))
    steps = np.arange(per_side) / per_side
    half = side / 2
    x0, y0 = center_x - half, center_y - half
    edges = [
        np.column_stack([x0 + steps * side, np.full(per_side, y0)]),
        np.column_stack([np.full(per_side, x0 + side), y0 + steps * side]),
        np.column_stack([x0 + side - steps * side, np.full(per_side, y0 + side)]),
        np.column_stack([np.full(per_side, x0), y0 + side - steps * side]),
    ]
    return np.vstack(edges)


def build_targets(config: RunConfig) -> List[Target]:
    targets = [
        Target(
            position=(t[0], t[1]),
            reflectivity=complex(t[2], t[3]) if len(t) == 4 else 1.0,
        )
        for t in config.targets
    ]
    if config.square_targets is not None:
        targets.extend(
            Target(position=(float(x), float(y)))
            for x, y in square_outline(*config.square_targets)
        )
    if not targets:
        targets.append(Target(position=tuple(config.roi_center_m)))
    return targets


def build_scene(config: RunConfig) -> Scene:
    carrier = config.carrier_ghz * 1e9
    wavelength = speed_of_light / carrier
    spacing = _auto(config.element_spacing_m, wavelength / 2)
    bs_center = np.radians(config.bs_center_deg)
    if config.bs_antennas is not None:
        aperture = config.bs_antennas * spacing
    else:
        aperture = wavelength / (np.radians(config.beamwidth_deg) * np.cos(bs_center))
    return Scene(
        source_height=config.source_height_m,
        element_count=config.element_count,
        element_spacing=spacing,
        plane_offset=_auto(
            config.plane_offset_m, centered_plane_offset(config.source_height_m, bs_center)
        ),
        roi=Roi(center=tuple(config.roi_center_m), size=tuple(config.roi_size_m)),
        carrier_frequency=carrier,
        bandwidth=config.bandwidth_mhz * 1e6,
        bs_aperture=float(aperture),
        targets=tuple(build_targets(config)),
    )


def _radians_or_none(value) -> Optional[float]:
    return None if value == AUTO else float(np.radians(value))


def build_design(
    config: RunConfig, scene: Scene, context: Optional[RunContext] = None
) -> SystemDesign:
    return design_system(
        scene,
        bs_center=float(np.radians(config.bs_center_deg)),
        bs_width=float(np.radians(config.bs_width_deg)),
        bs_step=_radians_or_none(config.bs_step_deg),
        dwell=None if config.dwell_ms == AUTO else config.dwell_ms * 1e-3,
        reflection_center=_radians_or_none(config.reflection_center_deg),
        reflection_width=_radians_or_none(config.reflection_width_deg),
        reflection_count=None if config.reflection_count == AUTO else config.reflection_count,
        spatial_period=None if config.spatial_period_m == AUTO else config.spatial_period_m,
        temporal_period=(
            None if config.temporal_period_ms == AUTO else config.temporal_period_ms * 1e-3
        ),
        static=config.mode == "multiview-static",
        grid_points=config.roi_grid_points,
        context=context,
    )


def plan_for_mode(
    mode: str, schedule: SweepSchedule, design: SystemDesign, scene: Scene
) -> PhasePlan:
    if mode == "mirror":
        return mirror_baseline_plan(
            scene, design.law.bs_center, design.law.reflection_center, schedule
        )
    # the static variant is already encoded in the law (Λ_τ = ∞)
    return build_phase_plan(schedule, design.law, design.layout, scene)


def sweep_count(config: RunConfig, design: SystemDesign) -> int:
    if config.sweeps != AUTO:
        return config.sweeps
    return len(design.reflection_codebook) if config.mode == "multiview" else 1


def build_image_grid(config: RunConfig, scene: Scene) -> ImageGrid:
    center = _auto(config.image_roi_center_m, config.roi_center_m)
    size = _auto(config.image_roi_size_m, config.roi_size_m)
    spacing = _auto(config.pixel_spacing_m, scene.wavelength / 4)
    return ImageGrid.covering(Roi(center=tuple(center), size=tuple(size)), spacing)


# --- Results ---


@dataclass_json
@dataclass
class RunManifest:
    """Provenance of one run, written last as `manifest.json`."""

    config_hash: str
    seed: int
    mode: str
    sweeps: int
    versions: Dict[str, str]
    artifacts: List[str]
    warnings: List[str]
    config: Dict[str, Any]
    elapsed_s: float
    _version: int = NLOSVIEW_WIRE_VERSION


@dataclass
class PipelineOutput:
    config: RunConfig
    scene: Scene
    design: SystemDesign
    schedule: SweepSchedule
    plan: PhasePlan
    cube: EchoCube
    image: ComplexImage
    metrics: ImageMetrics
    width_x_by_sweeps: List[float]
    warnings: List[str]
    artifacts: Dict[str, Path] = field(default_factory=dict)


def simulate(config: RunConfig, context: Optional[RunContext] = None) -> PipelineOutput:
    """design → plan → simulate → image → metrics, without touching the disk."""
    context = context or RunContext(threads=None if config.threads == AUTO else config.threads)
    scene = build_scene(config)
    design = build_design(config, scene, context)
    schedule = build_schedule(design.bs_codebook, sweep_count(config, design))
    plan = plan_for_mode(config.mode, schedule, design, scene)
    logger.info(
        f"{config.mode}: {schedule.sweep_count} sweep(s) of "
        + f"{schedule.snapshots_per_sweep} snapshot(s), {len(scene.targets)} target(s)."
    )

    cube = simulate_acquisition(
        scene,
        schedule,
        plan,
        RadiometricParams(tx_scale=config.tx_scale),
        NoiseSpec(enabled=config.noise, power_dbm=config.noise_dbm),
        config.seed,
        mode=config.echo_mode,
        oversample=config.oversample,
        context=context,
    )
    grid = build_image_grid(config, scene)
    if config.mode == "mirror":
        per_sweep = beam_scan_sweeps(cube, grid, scene, plan, context=context)
    else:
        per_sweep = backproject_sweeps(
            cube,
            grid,
            scene,
            plan,
            plane_compensation=config.plane_compensation,
            context=context,
        )
    image = accumulate_sweeps(per_sweep)
    metrics = image_metrics(image)
    widths = width_x_by_sweeps(per_sweep)
    logger.info(
        f"Accumulated {len(per_sweep)} sweep(s): width_x = {metrics.width_x_m:.4f} m, "
        + f"width_y = {metrics.width_y_m:.4f} m, PSLR = {metrics.pslr_db:.2f} dB."
    )
    return PipelineOutput(
        config=config,
        scene=scene,
        design=design,
        schedule=schedule,
        plan=plan,
        cube=cube,
        image=image,
        metrics=metrics,
        width_x_by_sweeps=widths,
        warnings=list(context.warnings),
    )


def write_design_report(report: DesignReport, out_dir: Union[str, Path]) -> Path:
    return write_json_document(report, Path(out_dir) / DESIGN_REPORT)


def run(
    config: RunConfig,
    out_dir: Union[str, Path],
    context: Optional[RunContext] = None,
) -> PipelineOutput:
    """
    Runs the whole pipeline and writes its artifacts into `out_dir`. Every
    file is written atomically; the manifest is written last. In strict mode
    a `StrictModeError` is raised after the artifacts are on disk.
    """
    started = time.monotonic()
    context = context or RunContext(threads=None if config.threads == AUTO else config.threads)
    out_dir = Path(out_dir)
    output = simulate(config, context)
    artifacts = output.artifacts

    artifacts["design_report"] = write_design_report(output.design.report, out_dir)
    if "csv" in config.emit:
        artifacts["image_csv"] = write_image_csv(output.image, out_dir / IMAGE_CSV)
    if "pgm" in config.emit:
        artifacts["image_pgm"] = write_image_pgm(output.image, out_dir / IMAGE_PGM)
    if "json" in config.emit:
        grid = output.image.grid
        document = MetricsDocument(
            mode=config.mode,
            sweeps=output.schedule.sweep_count,
            seed=config.seed,
            metrics=output.metrics,
            width_x_by_sweeps_m=output.width_x_by_sweeps,
            grid_origin_m=list(grid.origin),
            pixel_spacing_m=grid.spacing,
            grid_shape=[grid.ny, grid.nx],
            out_of_window_queries=output.image.out_of_window,
        )
        artifacts["metrics"] = write_json_document(document, out_dir / METRICS)
    if "plan" in config.emit:
        with atomic_writer(out_dir / PHASE_PLAN, "w") as handle:
            output.plan.to_frame(output.scene.element_indices).to_csv(
                handle, index=False, float_format="%.9f"
            )
        artifacts["phase_plan"] = out_dir / PHASE_PLAN
    if "cube" in config.emit:
        artifacts["echo_cube"] = write_cube(output.cube, out_dir / ECHO_CUBE)

    output.warnings = list(context.warnings)
    manifest = RunManifest(
        config_hash=stable_key_for_config(config),
        seed=config.seed,
        mode=config.mode,
        sweeps=output.schedule.sweep_count,
        versions=dependency_versions(),
        artifacts=sorted(p.name for p in artifacts.values()),
        warnings=output.warnings,
        config=config._to_wire_format(),
        elapsed_s=round(time.monotonic() - started, 3),
    )
    artifacts["manifest"] = write_json_document(manifest, out_dir / MANIFEST)

    if config.strict and output.warnings:
        raise StrictModeError(output.warnings)
    return output


def design_only(
    config: RunConfig,
    out_dir: Optional[Union[str, Path]] = None,
    context: Optional[RunContext] = None,
) -> DesignReport:
    """Runs the design stage alone; writes `design_report.json` when given a folder."""
    context = context or RunContext(threads=1)
    scene = build_scene(config)
    report = build_design(config, scene, context).report
    if out_dir is not None:
        write_design_report(report, out_dir)
    if config.strict and context.warnings:
        raise StrictModeError(list(context.warnings))
    return report
