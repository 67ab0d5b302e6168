from .acquisition import (
    EchoCube,
    FastTimeWindow,
    NoiseSpec,
    fast_time_window,
    simulate_acquisition,
    spatial_narrowband_audit,
)
from .cube_io import read_cube, write_cube
from .echo import (
    RadiometricParams,
    SnapshotGeometry,
    dbm_to_watts,
    matched_pulse,
    plane_response,
    snapshot_echo,
)
from .schedule import SweepSchedule, build_schedule

__all__ = [
    "EchoCube",
    "FastTimeWindow",
    "NoiseSpec",
    "RadiometricParams",
    "SnapshotGeometry",
    "SweepSchedule",
    "build_schedule",
    "dbm_to_watts",
    "fast_time_window",
    "matched_pulse",
    "plane_response",
    "read_cube",
    "simulate_acquisition",
    "snapshot_echo",
    "spatial_narrowband_audit",
    "write_cube",
]
