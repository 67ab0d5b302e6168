import numpy as np
import pytest
from scipy.constants import speed_of_light

from nlosview.forward import build_schedule, simulate_acquisition
from nlosview.imaging import (
    ComplexImage,
    ImageGrid,
    accumulate_sweeps,
    backproject,
    backproject_sweeps,
    beam_scan_image,
    image_metrics,
    mirror_baseline_plan,
)
from nlosview.imaging.backprojection import row_geometry
from nlosview.metasurface import build_phase_plan
from nlosview.run import RunContext
from nlosview.scene import Roi, Target
from nlosview.scene.views import view_count
from nlosview.utils.error import GeometryError

from .conftest import BS_CENTER, ROI_CENTER


def test_grid_covers_the_roi():
    grid = ImageGrid.covering(Roi(center=(9.5, -14.0), size=(1.0, 0.5)), 0.1)
    assert (grid.nx, grid.ny) == (11, 6)
    assert grid.shape == (6, 11)
    assert grid.x_axis[0] == pytest.approx(9.0)
    assert grid.x_axis[-1] == pytest.approx(10.0)
    xs, ys = grid.mesh()
    assert xs.shape == ys.shape == grid.shape


def test_grid_around_a_point_has_it_as_centre_node():
    grid = ImageGrid.around(ROI_CENTER, 0.05, 0.01)
    assert (grid.nx, grid.ny) == (11, 11)
    assert grid.node(5, 5) == pytest.approx(ROI_CENTER)
    assert grid.nearest_node((9.5, -14.0)) == (5, 5)
    assert grid.nearest_node((100.0, -100.0)) == (0, 10)


def test_grid_must_lie_below_the_plane():
    with pytest.raises(GeometryError):
        ImageGrid(origin=(0.0, -0.05), spacing=0.01, nx=3, ny=10)
    with pytest.raises(GeometryError):
        ImageGrid(origin=(0.0, -1.0), spacing=0.0, nx=3, ny=3)


def test_accumulate_needs_one_grid():
    first = ComplexImage(values=np.ones((3, 3), dtype=complex), grid=ImageGrid((0.0, -1.0), 0.1, 3, 3))
    other = ComplexImage(values=np.ones((3, 3), dtype=complex), grid=ImageGrid((0.0, -2.0), 0.1, 3, 3))
    with pytest.raises(GeometryError):
        accumulate_sweeps([first, other])
    with pytest.raises(GeometryError):
        accumulate_sweeps([])
    total = accumulate_sweeps([first, first.scaled(2.0)])
    np.testing.assert_array_equal(total.values, np.full((3, 3), 3.0))


def test_compensation_needs_the_plan(desk_acquisition):
    scene, schedule, plan = desk_acquisition
    cube = simulate_acquisition(scene, schedule, plan)
    grid = ImageGrid.around(ROI_CENTER, 0.02, 0.01)
    with pytest.raises(GeometryError):
        backproject(cube, grid, scene)
    uncompensated = backproject(cube, grid, scene, plane_compensation=False)
    assert uncompensated.values.shape == grid.shape


def test_multiview_image_peaks_at_the_target(desk_acquisition):
    scene, schedule, plan = desk_acquisition
    cube = simulate_acquisition(scene, schedule, plan)
    grid = ImageGrid.around(ROI_CENTER, 0.05, 0.01)
    images = backproject_sweeps(cube, grid, scene, plan)
    assert len(images) == 2
    image = accumulate_sweeps(images)
    assert image.sweeps_used == (0, 1)
    metrics = image_metrics(image)
    assert (metrics.peak_x_m, metrics.peak_y_m) == pytest.approx(ROI_CENTER, abs=1e-9)


def test_mirror_image_peaks_at_the_target(desk_scene, desk_design):
    schedule = build_schedule(desk_design.bs_codebook, 1)
    plan = mirror_baseline_plan(
        desk_scene, BS_CENTER, desk_design.law.reflection_center, schedule
    )
    assert view_count(ROI_CENTER, schedule, plan, desk_scene) > 0
    cube = simulate_acquisition(desk_scene, schedule, plan)
    image = backproject(cube, ImageGrid.around(ROI_CENTER, 0.05, 0.01), desk_scene, plan)
    metrics = image_metrics(image)
    assert (metrics.peak_x_m, metrics.peak_y_m) == pytest.approx(ROI_CENTER, abs=1e-9)


@pytest.mark.slow
def test_multiview_sweeps_see_the_target_at_least_as_often_as_a_mirror_sweep(desk_scene, desk_design):
    sweeps = len(desk_design.reflection_codebook)
    schedule = build_schedule(desk_design.bs_codebook, sweeps)
    multiview = build_phase_plan(schedule, desk_design.law, desk_design.layout, desk_scene)
    mirror = mirror_baseline_plan(
        desk_scene, BS_CENTER, desk_design.law.reflection_center, schedule
    )
    assert view_count(ROI_CENTER, schedule, multiview, desk_scene) >= view_count(
        ROI_CENTER, schedule.for_sweep(0), mirror, desk_scene
    )


@pytest.mark.slow
def test_image_does_not_depend_on_thread_count(desk_acquisition):
    scene, schedule, plan = desk_acquisition
    cube = simulate_acquisition(scene, schedule, plan, mode="sampled")
    grid = ImageGrid.around(ROI_CENTER, 0.03, 0.01)
    single = backproject(cube, grid, scene, plan, context=RunContext(threads=1))
    pooled = backproject(cube, grid, scene, plan, context=RunContext(threads=4))
    np.testing.assert_array_equal(single.values, pooled.values)
    assert single.out_of_window == pooled.out_of_window == 0


def test_mirror_beam_scan_peaks_at_the_target(desk_scene, desk_design):
    schedule = build_schedule(desk_design.bs_codebook, 1)
    plan = mirror_baseline_plan(
        desk_scene, BS_CENTER, desk_design.law.reflection_center, schedule
    )
    cube = simulate_acquisition(desk_scene, schedule, plan)
    image = beam_scan_image(cube, ImageGrid.around(ROI_CENTER, 0.05, 0.01), desk_scene, plan)
    assert np.all(image.values.imag == 0)
    assert np.all(image.values.real >= 0)
    metrics = image_metrics(image)
    # one pixel
    assert (metrics.peak_x_m, metrics.peak_y_m) == pytest.approx(ROI_CENTER, abs=0.0101)


def test_compensated_terms_align_in_phase_at_the_target(desk_acquisition):
    scene, schedule, plan = desk_acquisition
    cube = simulate_acquisition(scene, schedule, plan)
    x, y = ROI_CENTER
    k2 = 4 * np.pi / scene.wavelength
    terms = []
    for row in range(len(cube)):
        geometry = row_geometry(cube, row, scene, plan)
        total_range = geometry.round_trip_range(x, y)
        echo = cube.echo_at(row, 2 * total_range / speed_of_light)
        response = geometry.response(x, y, scene)
        terms.append(echo * np.exp(1j * k2 * total_range) * np.exp(-2j * np.angle(response)))
    terms = np.array(terms)
    assert np.sum(np.abs(terms)) > 0
    assert abs(terms.sum()) == pytest.approx(np.sum(np.abs(terms)), rel=1e-6)

    single_pixel = ImageGrid(origin=ROI_CENTER, spacing=0.01, nx=1, ny=1)
    image = backproject(cube, single_pixel, scene, plan)
    assert image.values[0, 0] == pytest.approx(terms.sum(), rel=1e-9)


def test_echoes_and_images_add_over_targets(desk_acquisition):
    scene, schedule, plan = desk_acquisition
    first, second = Target(position=ROI_CENTER), Target(position=(9.6, -13.9))
    grid = ImageGrid.around(ROI_CENTER, 0.03, 0.01)

    def acquire(targets, mode):
        return simulate_acquisition(scene.with_targets(targets), schedule, plan, mode=mode)

    both, alone_first, alone_second = (
        acquire(t, "analytic") for t in ([first, second], [first], [second])
    )
    row = len(schedule) // 2
    times = alone_first.delays[row, 0] + np.linspace(-20, 20, 81) / scene.bandwidth
    np.testing.assert_allclose(
        both.echo_at(row, times),
        alone_first.echo_at(row, times) + alone_second.echo_at(row, times),
        rtol=1e-12,
        atol=1e-12 * np.abs(both.amplitudes).max(),
    )

    summed = backproject(alone_first, grid, scene, plan).values + backproject(
        alone_second, grid, scene, plan
    ).values
    joint = backproject(both, grid, scene, plan).values
    np.testing.assert_allclose(joint, summed, rtol=1e-9, atol=1e-9 * np.abs(joint).max())

    sampled = [acquire(t, "sampled") for t in ([first, second], [first], [second])]
    np.testing.assert_allclose(
        sampled[0].samples,
        sampled[1].samples + sampled[2].samples,
        rtol=1e-9,
        atol=1e-9 * np.abs(sampled[0].samples).max(),
    )


def test_image_peaks_at_random_target_placements(desk_scene, desk_design):
    sweeps = len(desk_design.reflection_codebook)
    schedule = build_schedule(desk_design.bs_codebook, sweeps)
    plan = build_phase_plan(schedule, desk_design.law, desk_design.layout, desk_scene)
    offsets = np.round(np.random.default_rng(7).uniform(-0.4, 0.4, size=(20, 2)), 2)
    for dx, dy in offsets:
        target = (round(ROI_CENTER[0] + dx, 2), round(ROI_CENTER[1] + dy, 2))
        scene = desk_scene.with_targets([Target(position=target)])
        cube = simulate_acquisition(scene, schedule, plan)
        image = backproject(cube, ImageGrid.around(target, 0.03, 0.01), scene, plan)
        metrics = image_metrics(image)
        assert (metrics.peak_x_m, metrics.peak_y_m) == pytest.approx(target, abs=1e-9)


def test_one_multiview_sweep_sees_the_center_more_than_once(reference_scene, reference_design):
    schedule = build_schedule(reference_design.bs_codebook, 1)
    plan = build_phase_plan(
        schedule, reference_design.law, reference_design.layout, reference_scene
    )
    assert view_count(ROI_CENTER, schedule, plan, reference_scene) >= 2
