from .array_response import module_steering_peak, reflected_array_response
from .phase_law import (
    PhaseLawParams,
    angular_difference,
    phase_profile,
    quantized_angular_difference,
    reflected_direction,
)
from .plan import (
    ModuleLayout,
    PhasePlan,
    SnapshotConfiguration,
    build_phase_plan,
    snapshot_configuration,
)

__all__ = [
    "ModuleLayout",
    "PhaseLawParams",
    "PhasePlan",
    "SnapshotConfiguration",
    "angular_difference",
    "build_phase_plan",
    "module_steering_peak",
    "phase_profile",
    "quantized_angular_difference",
    "reflected_array_response",
    "reflected_direction",
    "snapshot_configuration",
]
