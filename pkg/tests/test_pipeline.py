import json

import numpy as np
import pytest

from nlosview import RunResults, design_only, load_config, run, simulate
from nlosview.forward import read_cube
from nlosview.run.cli import EXIT_OK, EXIT_STRICT, EXIT_USER, main
from nlosview.run.config import RunConfig, parse_config_text
from nlosview.run.pipeline import build_targets, square_outline
from nlosview.utils.error import StrictModeError
from nlosview.utils.stable_key import stable_key_for_config

SMALL_RUN = """
roi_center_m = [9.5, -14]
roi_size_m = [1, 1]
targets = [[9.5, -14]]
sweeps = 2
image_roi_size_m = [0.2, 0.2]
pixel_spacing_m = 0.01
seed = 3
"""


@pytest.fixture
def small_config():
    return parse_config_text(SMALL_RUN, "small.cfg")


@pytest.fixture
def small_config_file(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_RUN, encoding="utf-8")
    return path


# --- Targets ---


def test_square_outline_walks_the_border():
    points = square_outline(0.0, 0.0, 1.0, 0.25)
    assert points.shape == (16, 2)
    np.testing.assert_allclose(np.abs(points).max(axis=1), 0.5)
    assert len({tuple(np.round(p, 9)) for p in points}) == 16
    assert [-0.5, -0.5] in points.tolist()


def test_targets_default_to_the_roi_center():
    assert [t.position for t in build_targets(parse_config_text(""))] == [(9.5, -14.0)]
    config = parse_config_text("targets = [[9, -14, 0, 1]]\nsquare_targets = [9.5, -14, 0.2, 0.1]\n")
    targets = build_targets(config)
    assert len(targets) == 9
    assert targets[0].reflectivity == 1j


# --- Design only ---


def test_reference_design_report():
    report = design_only(load_config("reference_scene"))
    assert report.a_inf_m == pytest.approx(1.1695, abs=1e-3)
    assert report.reflection_count == 15
    assert report.n_mod == 37
    assert report.module_length_m == pytest.approx(0.2, abs=0.01)
    assert report.lambda_tau_s == pytest.approx(0.15)
    assert any("differs from 2A∞" in w for w in report.warnings)


def test_design_report_file(tmp_path):
    design_only(load_config("desk_scale"), tmp_path)
    report = json.loads((tmp_path / "design_report.json").read_text())
    assert report["_version"] == 1
    assert report["bs_count"] >= 2


def test_point_roi_has_no_sampling_bound():
    config = parse_config_text("roi_size_m = [0, 0]\n")
    report = design_only(config)
    assert report.dtheta_i_max_rad == float("inf")
    assert report.bs_count == 2


def test_strict_design_fails_after_writing(tmp_path):
    config = load_config("reference_scene").with_overrides(strict=True)
    with pytest.raises(StrictModeError) as info:
        design_only(config, tmp_path)
    assert any("[design] " in w for w in info.value.warnings)
    assert (tmp_path / "design_report.json").is_file()


# --- Full runs ---


def test_simulate_images_the_target(small_config):
    output = simulate(small_config)
    assert output.schedule.sweep_count == 2
    assert len(output.width_x_by_sweeps) == 2
    assert (output.metrics.peak_x_m, output.metrics.peak_y_m) == pytest.approx(
        (9.5, -14.0), abs=1e-9
    )
    assert output.image.grid.shape == (21, 21)
    assert not output.artifacts


def test_run_writes_every_artifact(tmp_path, small_config):
    config = small_config.with_overrides(mode="mirror", emit=["csv", "pgm", "json", "plan", "cube"])
    output = run(config, tmp_path)
    assert np.all(output.image.values.imag == 0)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [
        "design_report.json",
        "echo_cube.bin",
        "image.csv",
        "image.pgm",
        "manifest.json",
        "metrics.json",
        "phase_plan.csv",
    ]

    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config_hash"] == stable_key_for_config(config)
    assert (manifest["seed"], manifest["mode"], manifest["sweeps"]) == (3, "mirror", 2)
    assert "manifest.json" not in manifest["artifacts"]
    assert "numpy" in manifest["versions"]
    assert manifest["warnings"] == output.warnings

    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["sweeps"] == 2
    assert metrics["grid_shape"] == [21, 21]
    assert len(metrics["width_x_by_sweeps_m"]) == 2

    assert len(read_cube(tmp_path / "echo_cube.bin")) == len(output.schedule)
    header = (tmp_path / "phase_plan.csv").read_text().splitlines()[0]
    assert header == "sweep,snapshot,element,phase_rad"
    assert (tmp_path / "image.pgm").read_bytes().startswith(b"P5\n21 21\n255\n")


@pytest.mark.slow
def test_runs_do_not_depend_on_thread_count(tmp_path, small_config):
    run(small_config.with_overrides(threads=1), tmp_path / "one")
    run(small_config.with_overrides(threads=3), tmp_path / "three")
    for name in ("image.csv", "metrics.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "three" / name).read_bytes()


def test_the_narrowband_condition_is_reported(small_config):
    output = simulate(small_config)
    assert any(w.startswith("[forward] Spatial narrowband") for w in output.warnings)


def test_results_wrapper(small_config, capsys):
    results = RunResults(simulate(small_config), print_summary=True)
    assert results.df.shape == (21, 21)
    assert results.df.values.max() == 0.0
    assert results.metrics.peak_magnitude > 0
    captured = capsys.readouterr()
    assert captured.out.startswith("MULTIVIEW[sweeps: 2]")
    assert captured.out.count("MULTIVIEW") == 1
    assert "WARN: [forward]" in captured.err


# --- Command line ---


def test_cli_lists_presets(capsys):
    assert main(["presets"]) == EXIT_OK
    assert "reference_scene" in capsys.readouterr().out.split()


def test_cli_run(tmp_path, small_config_file, capsys):
    code = main(["run", "--config", str(small_config_file), "--out", str(tmp_path / "out"), "--threads", "2"])
    assert code == EXIT_OK
    assert (tmp_path / "out" / "manifest.json").is_file()
    assert capsys.readouterr().out.startswith("MULTIVIEW[")


def test_cli_reports_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n", encoding="utf-8")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_USER
    assert "Unknown key `colour`" in capsys.readouterr().err
    assert main(["design-only", "--config", "no_such_preset"]) == EXIT_USER


def test_cli_strict_mode(tmp_path, small_config_file, capsys):
    assert main(["design-only", "--config", "reference_scene", "--strict"]) == EXIT_STRICT
    assert "WARN: [design]" in capsys.readouterr().err

    code = main(["run", "--config", str(small_config_file), "--out", str(tmp_path), "--strict"])
    assert code == EXIT_STRICT
    warnings = json.loads((tmp_path / "manifest.json").read_text())["warnings"]
    err = capsys.readouterr().err
    assert any(w.startswith("[forward]") for w in warnings)
    for warning in warnings:
        assert err.count("WARN: " + warning) == 1
    assert f"error: strict mode, {len(warnings)} warning(s)." in err


def test_cli_design_only_prints_json(capsys):
    assert main(["design-only", "--config", "desk_scale"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert np.isfinite(report["dtheta_i_max_rad"])


# --- Imaging quality ---

PIXEL = 0.01


def preset_variant(name, **changes):
    """Preset `name` with any of its keys replaced, validated like a file."""
    config = load_config(name)
    return RunConfig._from_wire_format({**config._to_wire_format(), **changes})


@pytest.fixture(scope="module")
def desk_outputs():
    return {
        mode: simulate(load_config("desk_scale").with_overrides(mode=mode))
        for mode in ("mirror", "multiview-static", "multiview")
    }


@pytest.mark.slow
def test_desk_multiview_resolution(desk_outputs):
    output = desk_outputs["multiview"]
    metrics = output.metrics
    assert output.schedule.sweep_count == 15
    assert (metrics.peak_x_m, metrics.peak_y_m) == pytest.approx((9.5, -14.0), abs=PIXEL + 1e-9)
    config = output.config
    lo, hi = np.radians(config.bs_center_deg + np.array([-1, 1]) * config.bs_width_deg / 2)
    segment_center = config.source_height_m * (np.tan(lo) + np.tan(hi)) / 2
    distance = np.hypot(9.5 - segment_center, 14.0)
    bound = output.scene.wavelength * distance / (2 * output.design.report.a_inf_m)
    assert bound == pytest.approx(0.071, abs=0.002)
    assert metrics.width_x_m <= 1.5 * bound


@pytest.mark.slow
def test_mirror_image_is_much_wider_than_multiview(desk_outputs):
    mirror = desk_outputs["mirror"].metrics
    assert (mirror.peak_x_m, mirror.peak_y_m) == pytest.approx((9.5, -14.0), abs=PIXEL + 1e-9)
    assert mirror.width_x_m >= 4 * desk_outputs["multiview"].metrics.width_x_m


@pytest.mark.slow
def test_more_sweeps_narrow_the_image(desk_outputs):
    mirror, static, multiview = (
        desk_outputs[m].metrics.width_x_m for m in ("mirror", "multiview-static", "multiview")
    )
    assert mirror - static >= PIXEL
    assert static - multiview >= PIXEL

    widths = desk_outputs["multiview"].width_x_by_sweeps
    assert len(widths) == 15
    for before, after in zip(widths, widths[1:]):
        assert after <= before + PIXEL
    assert widths[-1] < widths[0]


@pytest.mark.slow
def test_near_targets_gain_range_resolution():
    near = simulate(load_config("near_target")).metrics
    far = simulate(load_config("far_target")).metrics
    assert 1.5 * near.width_y_m <= far.width_y_m
    # c/(2B) at 400 MHz
    assert far.width_y_m == pytest.approx(0.375, rel=0.3)


@pytest.mark.slow
def test_sweeps_even_out_the_resolution_across_the_roi():
    first, last = [], []
    for dx in (-0.35, 0.0, 0.35):
        for dy in (-0.35, 0.0, 0.35):
            target = [9.5 + dx, -14.0 + dy]
            output = simulate(
                preset_variant(
                    "desk_scale",
                    targets=[target],
                    image_roi_center_m=target,
                    image_roi_size_m=[0.6, 0.1],
                )
            )
            first.append(output.width_x_by_sweeps[0])
            last.append(output.width_x_by_sweeps[-1])

    def variation(widths):
        return np.std(widths) / np.mean(widths)

    assert variation(last) < 0.2
    assert variation(last) < variation(first)
