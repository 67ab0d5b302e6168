import logging
import time
from typing import *

import numpy as np
from scipy.constants import speed_of_light

from ..forward.acquisition import EchoCube, map_chunks
from ..metasurface.plan import ModuleLayout, PhasePlan
from ..run.context import RunContext, report_warning
from ..scene.scene import Scene
from .backprojection import row_geometry
from .grid import ComplexImage, ImageGrid

if TYPE_CHECKING:
    from ..forward.schedule import SweepSchedule

logger = logging.getLogger(__name__)


def mirror_baseline_plan(
    scene: Scene,
    bs_center: float,
    reflection_center: float,
    schedule: Optional["SweepSchedule"] = None,
) -> PhasePlan:
    """
    A time-invariant plane steering `θ̄_i → θ̄_o` everywhere: one module spanning
    the whole plane, phase referenced to the plane centre. With
    `θ̄_o = θ̄_i` it is a bare metallic mirror.
    """
    shape = (1, 1) if schedule is None else (schedule.sweep_count, schedule.snapshots_per_sweep)
    return PhasePlan(
        layout=ModuleLayout(scene.element_count, scene.element_count),
        positions=scene.element_positions,
        bs_center=bs_center,
        wavelength=scene.wavelength,
        module_deltas=np.full(shape + (1,), reflection_center - bs_center),
        label="mirror",
    )


def _beam_scan_rows(
    rows: range, cube: EchoCube, grid: ImageGrid, scene: Scene, plan: PhasePlan
) -> Tuple[np.ndarray, np.ndarray, int]:
    xs, ys = grid.mesh()
    matched = np.zeros(grid.shape)
    energy = np.zeros(grid.shape)
    outside = 0
    for row in rows:
        geometry = row_geometry(cube, row, scene, plan)
        echo = cube.echo_at(row, 2 * geometry.round_trip_range(xs, ys) / speed_of_light)
        missing = np.isnan(echo)
        if missing.any():
            outside += int(missing.sum())
            echo = np.where(missing, 0, echo)
        pattern = np.abs(geometry.response(xs, ys, scene)) ** 2
        matched += np.abs(echo) * pattern
        energy += pattern**2
    return matched, energy, outside


def beam_scan_image(
    cube: EchoCube,
    grid: ImageGrid,
    scene: Scene,
    plan: PhasePlan,
    *,
    context: Optional[RunContext] = None,
) -> ComplexImage:
    """
    Image formed the way a mirror-based system forms it: the plane is a fixed
    reflector, and the BS sweep scans its beam over the region. The echo
    magnitude at each pixel's delay is weighted by the two-way beam pattern
    toward the pixel, normalized over the snapshots:

        I(x) = Σ_τ |y(t_x, τ)| · |S(τ; x)|² / sqrt(Σ_τ |S(τ; x)|⁴)

    No phase is combined across snapshots, so cross-range resolution follows
    the beamwidth and range resolution the bandwidth. For a single noiseless
    target the normalized weights make the target pixel the maximum.
    """
    threads = context.threads if context is not None else 1
    started = time.monotonic()
    parts = map_chunks(
        lambda rows: _beam_scan_rows(rows, cube, grid, scene, plan), len(cube), threads
    )
    matched = np.zeros(grid.shape)
    energy = np.zeros(grid.shape)
    outside = 0
    for part_matched, part_energy, missed in parts:
        matched += part_matched
        energy += part_energy
        outside += missed

    values = np.divide(
        matched, np.sqrt(energy), out=np.zeros(grid.shape), where=energy > 0
    )
    if outside:
        report_warning(
            context,
            "imaging",
            f"{outside} beam-scan queries fell outside the fast-time window "
            + "and contributed zero.",
        )
    logger.info(
        f"Beam-scanned {len(cube)} snapshot(s) onto {grid.nx}×{grid.ny} pixels "
        + f"in {time.monotonic() - started:.2f}s."
    )
    return ComplexImage(
        values=values.astype(complex),
        grid=grid,
        sweeps_used=tuple(int(s) for s in cube.sweeps),
        seed=cube.seed,
        out_of_window=outside,
    )


def beam_scan_sweeps(
    cube: EchoCube,
    grid: ImageGrid,
    scene: Scene,
    plan: PhasePlan,
    *,
    context: Optional[RunContext] = None,
) -> List[ComplexImage]:
    """One beam-scan image per sweep of `cube`, in sweep order."""
    return [
        beam_scan_image(sweep_cube, grid, scene, plan, context=context)
        for sweep_cube in cube.split_sweeps()
    ]
