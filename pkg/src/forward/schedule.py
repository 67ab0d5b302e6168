from dataclasses import dataclass
from typing import *

import numpy as np

from ..design.codebook import BsCodebook
from ..utils.error import GeometryError


@dataclass(frozen=True)
class SweepSchedule:
    """
    Ordered snapshots of an acquisition. Snapshot `k` of sweep `s` points the
    BS at `Θᵢ[k]` and starts at `τ = s·T + k·Δτ`.
    """

    sweep_index: np.ndarray
    snapshot_index: np.ndarray
    theta_i: np.ndarray
    tau: np.ndarray
    dwell: float
    snapshots_per_sweep: int

    def __post_init__(self):
        if len(self.tau) > 1 and np.any(np.diff(self.tau) <= 0):
            raise GeometryError("Snapshot times must be strictly increasing.")

    def __len__(self) -> int:
        return len(self.tau)

    @property
    def sweep_duration(self) -> float:
        return self.snapshots_per_sweep * self.dwell

    @property
    def sweep_count(self) -> int:
        return len(self) // self.snapshots_per_sweep if self.snapshots_per_sweep else 0

    @property
    def total_duration(self) -> float:
        return self.sweep_count * self.sweep_duration

    @property
    def tau_in_sweep(self) -> np.ndarray:
        return self.snapshot_index * self.dwell

    def for_sweep(self, sweep: int) -> "SweepSchedule":
        keep = self.sweep_index == sweep
        return SweepSchedule(
            sweep_index=self.sweep_index[keep],
            snapshot_index=self.snapshot_index[keep],
            theta_i=self.theta_i[keep],
            tau=self.tau[keep],
            dwell=self.dwell,
            snapshots_per_sweep=self.snapshots_per_sweep,
        )


def build_schedule(codebook: BsCodebook, sweeps: int) -> SweepSchedule:
    if sweeps < 1:
        raise GeometryError(f"At least one sweep is required, got {sweeps}.")
    per_sweep = len(codebook)
    sweep_index = np.repeat(np.arange(sweeps), per_sweep)
    snapshot_index = np.tile(np.arange(per_sweep), sweeps)
    return SweepSchedule(
        sweep_index=sweep_index,
        snapshot_index=snapshot_index,
        theta_i=np.tile(codebook.angles, sweeps),
        tau=sweep_index * codebook.sweep_duration + snapshot_index * codebook.dwell,
        dwell=codebook.dwell,
        snapshots_per_sweep=per_sweep,
    )
