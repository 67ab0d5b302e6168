import logging
from dataclasses import dataclass
from typing import *

import numpy as np
import pandas as pd

from ..utils.error import GeometryError
from .phase_law import PhaseLawParams, phase_profile, quantized_angular_difference

if TYPE_CHECKING:
    from ..forward.schedule import SweepSchedule
    from ..scene.scene import Scene

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModuleLayout:
    """
    Contiguous blocks of `module_size` elements, left to right. When `N` is
    not a multiple of the module size the last module is shorter.
    """

    element_count: int
    module_size: int

    def __post_init__(self):
        if self.module_size < 1:
            raise GeometryError(f"Module size must be ≥ 1, got {self.module_size}.")
        if self.element_count < 1:
            raise GeometryError(f"Element count must be ≥ 1, got {self.element_count}.")

    @property
    def module_count(self) -> int:
        return -(-self.element_count // self.module_size)

    @property
    def module_of_element(self) -> np.ndarray:
        """Module id of every element, indexed by 0-based array position."""
        return np.arange(self.element_count) // self.module_size

    def module_centers(self, positions: np.ndarray) -> np.ndarray:
        ids = self.module_of_element
        sums = np.bincount(ids, weights=positions, minlength=self.module_count)
        counts = np.bincount(ids, minlength=self.module_count)
        return sums / counts


@dataclass(frozen=True)
class SnapshotConfiguration:
    phases: np.ndarray
    module_deltas: np.ndarray
    illuminated: Optional[np.ndarray] = None


def element_phases_from_modules(
    module_deltas: np.ndarray,
    layout: ModuleLayout,
    positions: np.ndarray,
    bs_center: float,
    wavelength: float,
) -> np.ndarray:
    ids = layout.module_of_element
    centers = layout.module_centers(positions)
    return phase_profile(
        positions - centers[ids], module_deltas[ids], bs_center, wavelength
    )


def snapshot_configuration(
    tau: float,
    sweep_index: int,
    params: PhaseLawParams,
    layout: ModuleLayout,
    positions: np.ndarray,
    wavelength: float,
    illuminated: Optional[np.ndarray] = None,
) -> SnapshotConfiguration:
    """
    Global plane configuration at within-sweep time `tau` of sweep `sweep_index`.

    Each module samples the quantized law at its centre and effective time
    `tau + sweep_index·T`. Every element gets a phase; `illuminated` is only
    carried along for the caller.
    """
    centers = layout.module_centers(positions)
    effective_time = tau + sweep_index * params.sweep_duration
    deltas = quantized_angular_difference(centers, effective_time, params)
    phases = element_phases_from_modules(
        deltas, layout, positions, params.bs_center, wavelength
    )
    return SnapshotConfiguration(
        phases=phases, module_deltas=deltas, illuminated=illuminated
    )


@dataclass(frozen=True)
class PhasePlan:
    """
    Module angular differences for every (sweep, snapshot), from which element
    phases are rebuilt on demand. Storing per-module values keeps the plan
    small; `element_phases` and `to_frame` materialize the full Φ(τ).
    """

    layout: ModuleLayout
    positions: np.ndarray
    bs_center: float
    wavelength: float
    # (sweeps, snapshots per sweep, modules)
    module_deltas: np.ndarray
    label: str = "multiview"

    def __post_init__(self):
        if self.module_deltas.ndim != 3:
            raise GeometryError("Module deltas must be shaped (sweeps, snapshots, modules).")
        if self.module_deltas.shape[2] != self.layout.module_count:
            raise GeometryError(
                f"Plan holds {self.module_deltas.shape[2]} modules, "
                + f"layout has {self.layout.module_count}."
            )

    @property
    def sweep_count(self) -> int:
        return self.module_deltas.shape[0]

    @property
    def snapshots_per_sweep(self) -> int:
        return self.module_deltas.shape[1]

    @property
    def module_centers(self) -> np.ndarray:
        return self.layout.module_centers(self.positions)

    def deltas(self, sweep: int, snapshot: int) -> np.ndarray:
        # a plan shorter than the schedule repeats, as a static plane does
        return self.module_deltas[sweep % self.sweep_count, snapshot % self.snapshots_per_sweep]

    def element_phases(self, sweep: int, snapshot: int) -> np.ndarray:
        return element_phases_from_modules(
            self.deltas(sweep, snapshot),
            self.layout,
            self.positions,
            self.bs_center,
            self.wavelength,
        )

    def to_frame(self, element_indices: Optional[np.ndarray] = None) -> pd.DataFrame:
        """Long-format table with columns `sweep, snapshot, element, phase_rad`."""
        n_elem = len(self.positions)
        if element_indices is None:
            element_indices = np.arange(n_elem)
        blocks = []
        for sweep in range(self.sweep_count):
            for snapshot in range(self.snapshots_per_sweep):
                blocks.append(self.element_phases(sweep, snapshot))
        phases = np.concatenate(blocks) if blocks else np.empty(0)
        n_rows = self.sweep_count * self.snapshots_per_sweep
        return pd.DataFrame(
            {
                "sweep": np.repeat(np.arange(self.sweep_count), self.snapshots_per_sweep * n_elem),
                "snapshot": np.tile(
                    np.repeat(np.arange(self.snapshots_per_sweep), n_elem), self.sweep_count
                ),
                "element": np.tile(element_indices, n_rows),
                "phase_rad": phases,
            }
        )


def build_phase_plan(
    schedule: "SweepSchedule",
    params: PhaseLawParams,
    layout: ModuleLayout,
    scene: "Scene",
) -> PhasePlan:
    """Evaluates the quantized law for every module at every scheduled snapshot."""
    positions = scene.element_positions
    centers = layout.module_centers(positions)
    sweeps = schedule.sweep_count
    per_sweep = schedule.snapshots_per_sweep
    effective_time = (
        schedule.tau_in_sweep.reshape(sweeps, per_sweep)
        + schedule.sweep_index.reshape(sweeps, per_sweep) * params.sweep_duration
    )
    deltas = quantized_angular_difference(
        centers[None, None, :], effective_time[:, :, None], params
    )
    logger.info(
        f"Phase plan: {sweeps} sweep(s) × {per_sweep} snapshot(s) × "
        + f"{layout.module_count} module(s) of {layout.module_size} element(s)."
    )
    return PhasePlan(
        layout=layout,
        positions=positions,
        bs_center=params.bs_center,
        wavelength=scene.wavelength,
        module_deltas=np.broadcast_to(deltas, (sweeps, per_sweep, layout.module_count)).copy(),
        label="multiview-static" if params.is_static else "multiview",
    )
