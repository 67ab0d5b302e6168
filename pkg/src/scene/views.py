from typing import *

import numpy as np

from ..metasurface.phase_law import reflected_direction
from .geometry import element_index_to_array_index, illuminated_set, required_reflection_angle
from .scene import Point, Scene

if TYPE_CHECKING:
    from ..forward.schedule import SweepSchedule
    from ..metasurface.plan import PhasePlan


def snapshot_sees_target(
    r: Point,
    theta_i: float,
    module_deltas: np.ndarray,
    plan: "PhasePlan",
    scene: Scene,
    *,
    lit_aperture: bool = False,
) -> bool:
    """
    Whether any illuminated module reflects the beam toward `r`: the direction
    of `r` from the module centre must be within half a module beamwidth
    `λ0/(N_mod·d·cos θ_o)` of the module's reflected direction.

    With `lit_aperture`, only the module elements inside the footprint count:
    the centre and `N` are those of the lit part, which widens the beams of
    partially lit modules.
    """
    lit = illuminated_set(theta_i, scene.bs_beamwidth(theta_i), scene)
    if len(lit) == 0:
        return False
    array_idx = element_index_to_array_index(lit, scene)
    module_of_element = plan.layout.module_of_element
    lit_modules = module_of_element[array_idx]
    for module in np.unique(lit_modules):
        if lit_aperture:
            members = scene.element_positions[array_idx][lit_modules == module]
        else:
            members = scene.element_positions[module_of_element == module]
        theta_o = reflected_direction(theta_i, module_deltas[module], plan.bs_center)
        if np.isnan(theta_o):
            continue
        half_width = scene.wavelength / (
            2 * len(members) * scene.element_spacing * np.cos(theta_o)
        )
        seen_at = required_reflection_angle((members.mean(), 0.0), r)
        if abs(seen_at - theta_o) <= half_width:
            return True
    return False


def view_count(
    r: Point,
    schedule: "SweepSchedule",
    plan: "PhasePlan",
    scene: Scene,
    *,
    lit_aperture: bool = False,
) -> int:
    """Number of snapshots in `schedule` whose reflected beams reach `r`."""
    return sum(
        snapshot_sees_target(
            r,
            schedule.theta_i[k],
            plan.deltas(schedule.sweep_index[k], schedule.snapshot_index[k]),
            plan,
            scene,
            lit_aperture=lit_aperture,
        )
        for k in range(len(schedule))
    )
