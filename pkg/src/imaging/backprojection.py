import logging
import time
from typing import *

import numpy as np
from scipy.constants import speed_of_light

from ..forward.acquisition import EchoCube, map_chunks
from ..forward.echo import SnapshotGeometry
from ..metasurface.plan import PhasePlan
from ..run.context import RunContext, report_warning
from ..scene.scene import Scene
from ..utils.error import GeometryError
from .grid import ComplexImage, ImageGrid

logger = logging.getLogger(__name__)


def row_geometry(
    cube: EchoCube, row: int, scene: Scene, plan: Optional[PhasePlan]
) -> SnapshotGeometry:
    """Geometry of cube row `row`, with the element phases it was acquired with."""
    phases = (
        plan.element_phases(cube.sweep_index[row], cube.snapshot_index[row])
        if plan is not None
        else np.zeros(scene.element_count)
    )
    return SnapshotGeometry.build(cube.theta_i[row], scene, phases)


def _backproject_rows(
    rows: range,
    cube: EchoCube,
    grid: ImageGrid,
    scene: Scene,
    plan: Optional[PhasePlan],
    plane_compensation: bool,
) -> Tuple[np.ndarray, int]:
    xs, ys = grid.mesh()
    k2 = 4 * np.pi / scene.wavelength
    partial = np.zeros(grid.shape, dtype=complex)
    outside = 0
    for row in rows:
        geometry = row_geometry(cube, row, scene, plan)
        total_range = geometry.round_trip_range(xs, ys)
        echo = cube.echo_at(row, 2 * total_range / speed_of_light)
        missing = np.isnan(echo)
        if missing.any():
            outside += int(missing.sum())
            echo = np.where(missing, 0, echo)
        term = echo * np.exp(1j * k2 * total_range)
        if plane_compensation:
            response = geometry.response(xs, ys, scene)
            term = term * np.exp(-2j * np.angle(response))
        partial += term
    return partial, outside


def backproject(
    cube: EchoCube,
    grid: ImageGrid,
    scene: Scene,
    plan: Optional[PhasePlan] = None,
    *,
    plane_compensation: bool = True,
    context: Optional[RunContext] = None,
) -> ComplexImage:
    """
    Delay-and-phase compensated coherent sum over the snapshots of `cube`:

        I(x) = Σ_τ y(2[D_i + D_o(τ; x)]/c, τ) · e^{+j(4π/λ0)[D_i + D_o(τ; x)]} · c(τ; x)

    With `plane_compensation`, `c = e^{−j2·arg S(τ; x)}` also removes the phase
    the programmed plane imprints on the echo of a scatterer at `x`, which
    needs the `plan` the cube was acquired with. Without it `c = 1`.

    Snapshots are summed in fixed-size chunks reduced in schedule order, so
    the image does not depend on the thread count.
    """
    if plane_compensation and plan is None:
        raise GeometryError("Plane-compensated back-projection needs the phase plan.")
    if cube.mode == "sampled" and cube.samples is None:
        raise GeometryError("Sampled echo cube carries no samples.")
    threads = context.threads if context is not None else 1
    started = time.monotonic()

    parts = map_chunks(
        lambda rows: _backproject_rows(rows, cube, grid, scene, plan, plane_compensation),
        len(cube),
        threads,
    )
    values = np.zeros(grid.shape, dtype=complex)
    outside = 0
    for partial, missed in parts:
        values += partial
        outside += missed

    if outside:
        report_warning(
            context,
            "imaging",
            f"{outside} back-projection queries fell outside the fast-time window "
            + "and contributed zero.",
        )
    logger.info(
        f"Back-projected {len(cube)} snapshot(s) onto {grid.nx}×{grid.ny} pixels "
        + f"in {time.monotonic() - started:.2f}s."
    )
    return ComplexImage(
        values=values,
        grid=grid,
        sweeps_used=tuple(int(s) for s in cube.sweeps),
        seed=cube.seed,
        out_of_window=outside,
    )


def accumulate_sweeps(images: Sequence[ComplexImage]) -> ComplexImage:
    """Coherent sum of per-sweep images that share one grid."""
    if not images:
        raise GeometryError("Nothing to accumulate: no per-sweep images.")
    grid = images[0].grid
    for image in images[1:]:
        if image.grid != grid:
            raise GeometryError("Per-sweep images must share one image grid.")
    values = np.zeros(grid.shape, dtype=complex)
    sweeps: List[int] = []
    for image in images:
        values += image.values
        sweeps.extend(image.sweeps_used)
    return ComplexImage(
        values=values,
        grid=grid,
        sweeps_used=tuple(sweeps),
        seed=images[0].seed,
        out_of_window=sum(i.out_of_window for i in images),
    )


def backproject_sweeps(
    cube: EchoCube,
    grid: ImageGrid,
    scene: Scene,
    plan: Optional[PhasePlan] = None,
    *,
    plane_compensation: bool = True,
    context: Optional[RunContext] = None,
) -> List[ComplexImage]:
    """One image per sweep of `cube`, in sweep order."""
    return [
        backproject(
            sweep_cube,
            grid,
            scene,
            plan,
            plane_compensation=plane_compensation,
            context=context,
        )
        for sweep_cube in cube.split_sweeps()
    ]
