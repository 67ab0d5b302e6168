import numpy as np
import pytest
from scipy.constants import speed_of_light

from nlosview.design import design_system
from nlosview.forward import build_schedule
from nlosview.metasurface import build_phase_plan
from nlosview.scene import Roi, Scene, Target, centered_plane_offset

CARRIER = 28e9
WAVELENGTH = speed_of_light / CARRIER
SPACING = WAVELENGTH / 2
BS_CENTER = np.radians(30)
BS_WIDTH = np.radians(10)
ROI_CENTER = (9.5, -14.0)


def make_scene(roi_size=(5.0, 5.0), targets=(ROI_CENTER,), roi_center=ROI_CENTER, **overrides):
    fields = dict(
        source_height=5.0,
        element_count=320,
        element_spacing=SPACING,
        plane_offset=centered_plane_offset(5.0, BS_CENTER),
        roi=Roi(center=roi_center, size=roi_size),
        carrier_frequency=CARRIER,
        bandwidth=400e6,
        # θ_BW = 2.5° at θ̄_i = 30°
        bs_aperture=WAVELENGTH / (np.radians(2.5) * np.cos(BS_CENTER)),
        targets=tuple(Target(position=t) for t in targets),
    )
    fields.update(overrides)
    return Scene(**fields)


@pytest.fixture
def reference_scene():
    """Full-size scene: 5 m × 5 m ROI around (9.5, −14) m."""
    return make_scene()


@pytest.fixture
def desk_scene():
    """Same plane and BS, 1 m × 1 m ROI."""
    return make_scene(roi_size=(1.0, 1.0))


@pytest.fixture
def reference_design(reference_scene):
    return design_system(
        reference_scene,
        bs_center=BS_CENTER,
        bs_width=BS_WIDTH,
        reflection_count=15,
        spatial_period=6.0,
    )


@pytest.fixture
def desk_design(desk_scene):
    return design_system(desk_scene, bs_center=BS_CENTER, bs_width=BS_WIDTH)


@pytest.fixture
def desk_acquisition(desk_scene, desk_design):
    """Desk scene with a two-sweep schedule and its multiview phase plan."""
    schedule = build_schedule(desk_design.bs_codebook, 2)
    plan = build_phase_plan(schedule, desk_design.law, desk_design.layout, desk_scene)
    return desk_scene, schedule, plan
