import json

import pytest

from nlosview.run.config import AUTO, RunConfig, load_config, parse_config_text, preset_names
from nlosview.utils.error import UserConfigError
from nlosview.utils.stable_key import stable_key_for_config

KEY_VALUE = """
# desk run
source_height_m = 5
roi_center_m = [9.5, -14]   # meters
roi_size_m = [1, 1]
targets = [[9.5, -14], [9.6, -14.1, 0.5, 0]]
mode = mirror
noise = false
emit = csv,json
"""


def test_key_value_config():
    config = parse_config_text(KEY_VALUE)
    assert config.source_height_m == 5.0
    assert config.roi_center_m == [9.5, -14.0]
    assert config.targets == [[9.5, -14.0], [9.6, -14.1, 0.5, 0.0]]
    assert config.mode == "mirror"
    assert config.noise is False
    assert config.emit == ["csv", "json"]
    assert config.reflection_count == AUTO


def test_json_config():
    config = parse_config_text(
        json.dumps({"roi_size_m": [2, 2], "reflection_count": 15, "bs_step_deg": "auto"})
    )
    assert config.roi_size_m == [2.0, 2.0]
    assert config.reflection_count == 15
    assert config.bs_step_deg == AUTO


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("seed = 1\nseed = 2\n", 2, "Duplicate key `seed`"),
        ("seed = 1\n\ncolour = red\n", 3, "Unknown key `colour`"),
        ("seed = 1\nnot a pair\n", 2, "key = value"),
        ("seed = -1\n", 1, "≥ 0"),
        ("mode = sideways\n", 1, "expected one of"),
        ("element_count = auto\n", 1, "does not accept `auto`"),
        ("seed =\n", 1, "has no value"),
        ("square_targets = [9.5, -14, 0, 0.1]\n", 1, "side, spacing > 0"),
        ('{\n  "seed": 1,\n  "roi_center_m": 3\n}', 3, "[x, y]"),
    ],
)
def test_config_errors_point_at_the_line(text, line, fragment):
    with pytest.raises(UserConfigError) as info:
        parse_config_text(text, "run.cfg")
    assert info.value.line == line
    assert fragment in info.value.message
    assert str(info.value).startswith(f"run.cfg:{line}: ")


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("bs_antennas = 53\nbeamwidth_deg = 2.5\n", 2, "only one"),
        ("bs_antennas = null\n", 1, "is required"),
        ("echo_mode = analytic\n\nnoise = true\n", 3, "echo_mode = sampled"),
        ("seed = 4\nelement_count = 321\n", 2, "even"),
        ("roi_center_m = [1, -0.2]\n", 1, "below the plane"),
        ("bs_center_deg = 85\n", 1, "(−90°, 90°)"),
    ],
)
def test_inconsistent_configs_are_rejected(text, line, fragment):
    with pytest.raises(UserConfigError) as info:
        parse_config_text(text, "run.cfg")
    assert fragment in info.value.message
    assert info.value.line == line
    assert str(info.value).startswith(f"run.cfg:{line}: ")


def test_inconsistency_between_defaults_has_no_line():
    with pytest.raises(UserConfigError) as info:
        RunConfig(element_count=321)._validate()
    assert info.value.line is None
    assert info.value.keys == ("element_count",)


def test_beamwidth_replaces_antenna_count():
    config = parse_config_text("beamwidth_deg = 2.5\n")
    assert config.bs_antennas is None
    assert config.beamwidth_deg == 2.5


def test_overrides_return_a_validated_copy():
    config = parse_config_text(KEY_VALUE)
    changed = config.with_overrides(seed=7, mode="multiview", emit=["pgm"], threads=2)
    assert (changed.seed, changed.mode, changed.emit, changed.threads) == (7, "multiview", ["pgm"], 2)
    assert config.seed == 0 and config.mode == "mirror"
    with pytest.raises(UserConfigError):
        config.with_overrides(sweeps=0)


def test_every_preset_loads():
    names = preset_names()
    assert names == ["desk_scale", "far_target", "near_target", "reference_scene"]
    for name in names:
        assert isinstance(load_config(name), RunConfig)
    reference = load_config("reference_scene.cfg")
    assert reference.beamwidth_deg == 2.5 and reference.bs_antennas is None
    assert reference.noise and reference.echo_mode == "sampled"


def test_config_files_load_from_disk(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(KEY_VALUE, encoding="utf-8")
    assert load_config(path).mode == "mirror"
    with pytest.raises(UserConfigError, match="Presets: desk_scale"):
        load_config(tmp_path / "missing.cfg")


def test_stable_key_ignores_output_options():
    config = parse_config_text(KEY_VALUE)
    key = stable_key_for_config(config)
    assert stable_key_for_config(config.with_overrides(threads=8, emit=["cube"], strict=True)) == key
    assert stable_key_for_config(config.with_overrides(seed=1)) != key


def test_config_wire_format():
    config = parse_config_text(KEY_VALUE)
    wire = config._to_wire_format()
    assert wire["_version"] == 1
    assert RunConfig._from_wire_format(wire) == config
