import json
import re
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import *

import numpy as np

from ..utils.builder import builder_method
from ..utils.error import UserConfigError
from ..utils.serializable import Serializable

AUTO = "auto"
MODES = ("multiview", "multiview-static", "mirror")
ECHO_MODES = ("analytic", "sampled")
EMIT_CHOICES = ("csv", "pgm", "json", "plan", "cube")
PRESET_SUFFIX = ".cfg"

Auto = Literal["auto"]


def _spec(
    kind: str, *, auto: bool = False, nullable: bool = False, check=None, hint: str = "", choices=()
):
    return {
        "kind": kind,
        "auto": auto,
        "nullable": nullable,
        "check": check,
        "hint": hint,
        "choices": choices,
    }


def _positive(v) -> bool:
    return v > 0


def _non_negative(v) -> bool:
    return v >= 0


@dataclass
class RunConfig(Serializable):
    """
    One simulation run. Values use the units people quote: degrees, GHz,
    MHz, milliseconds and dBm. Nothing here is converted to SI; that happens
    when the pipeline builds the scene and the codebooks.

    Any field documented as accepting `"auto"` is derived from the design
    bounds when left on `"auto"`.
    """

    # scene
    source_height_m: float = field(default=5.0, metadata=_spec("float", check=_positive, hint="> 0"))
    element_count: int = field(default=320, metadata=_spec("int", check=_positive, hint="> 0"))
    element_spacing_m: Union[float, Auto] = field(
        default=AUTO, metadata=_spec("float", auto=True, check=_positive, hint="> 0")
    )
    plane_offset_m: Union[float, Auto] = field(default=AUTO, metadata=_spec("float", auto=True))
    roi_center_m: List[float] = field(
        default_factory=lambda: [9.5, -14.0], metadata=_spec("point")
    )
    roi_size_m: List[float] = field(
        default_factory=lambda: [1.0, 1.0],
        metadata=_spec("point", check=lambda v: min(v) >= 0, hint="≥ 0 in both axes"),
    )
    carrier_ghz: float = field(default=28.0, metadata=_spec("float", check=_positive, hint="> 0"))
    bandwidth_mhz: float = field(default=400.0, metadata=_spec("float", check=_positive, hint="> 0"))
    bs_antennas: Optional[int] = field(
        default=53, metadata=_spec("int", nullable=True, check=_positive, hint="> 0")
    )
    beamwidth_deg: Optional[float] = field(
        default=None, metadata=_spec("float", nullable=True, check=_positive, hint="> 0")
    )

    # targets
    targets: List[List[float]] = field(default_factory=list, metadata=_spec("targets"))
    square_targets: Optional[List[float]] = field(default=None, metadata=_spec("square", nullable=True))

    # design
    bs_center_deg: float = field(default=30.0, metadata=_spec("float"))
    bs_width_deg: float = field(
        default=10.0, metadata=_spec("float", check=_non_negative, hint="≥ 0")
    )
    bs_step_deg: Union[float, Auto] = field(
        default=AUTO, metadata=_spec("float", auto=True, check=_positive, hint="> 0")
    )
    dwell_ms: Union[float, Auto] = field(
        default=AUTO, metadata=_spec("float", auto=True, check=_positive, hint="> 0")
    )
    reflection_center_deg: Union[float, Auto] = field(
        default=AUTO, metadata=_spec("float", auto=True)
    )
    reflection_width_deg: Union[float, Auto] = field(
        default=AUTO, metadata=_spec("float", auto=True, check=_non_negative, hint="≥ 0")
    )
    reflection_count: Union[int, Auto] = field(
        default=AUTO, metadata=_spec("int", auto=True, check=_positive, hint="≥ 1")
    )
    spatial_period_m: Union[float, Auto] = field(
        default=AUTO, metadata=_spec("float", auto=True, check=_positive, hint="> 0")
    )
    temporal_period_ms: Union[float, Auto] = field(
        default=AUTO, metadata=_spec("float", auto=True, check=_positive, hint="> 0")
    )
    roi_grid_points: int = field(
        default=9, metadata=_spec("int", check=lambda v: v >= 2, hint="≥ 2")
    )

    # acquisition
    mode: str = field(default="multiview", metadata=_spec("choice", choices=MODES))
    sweeps: Union[int, Auto] = field(
        default=AUTO, metadata=_spec("int", auto=True, check=_positive, hint="≥ 1")
    )
    echo_mode: str = field(default="analytic", metadata=_spec("choice", choices=ECHO_MODES))
    oversample: float = field(
        default=8.0, metadata=_spec("float", check=lambda v: v >= 1, hint="≥ 1")
    )
    tx_scale: float = field(default=1.0, metadata=_spec("float", check=_positive, hint="> 0"))
    noise: bool = field(default=False, metadata=_spec("bool"))
    noise_dbm: float = field(default=-87.0, metadata=_spec("float"))
    seed: int = field(default=0, metadata=_spec("int", check=_non_negative, hint="≥ 0"))

    # imaging
    pixel_spacing_m: Union[float, Auto] = field(
        default=AUTO, metadata=_spec("float", auto=True, check=_positive, hint="> 0")
    )
    image_roi_center_m: Union[List[float], Auto] = field(
        default=AUTO, metadata=_spec("point", auto=True)
    )
    image_roi_size_m: Union[List[float], Auto] = field(
        default=AUTO,
        metadata=_spec("point", auto=True, check=lambda v: min(v) > 0, hint="> 0 in both axes"),
    )
    plane_compensation: bool = field(default=True, metadata=_spec("bool"))

    # output
    emit: List[str] = field(
        default_factory=lambda: ["csv", "pgm", "json"],
        metadata=_spec("emit", choices=EMIT_CHOICES),
    )
    threads: Union[int, Auto] = field(
        default=AUTO, metadata=_spec("int", auto=True, check=_positive, hint="≥ 1")
    )
    strict: bool = field(default=False, metadata=_spec("bool"))

    # keys that cannot change any number the run produces
    NON_EFFECTIVE_KEYS: ClassVar[Tuple[str, ...]] = ("emit", "threads", "strict")

    # --- Builders ---

    @builder_method
    def with_overrides(
        self,
        *,
        seed: Optional[int] = None,
        mode: Optional[str] = None,
        sweeps: Optional[int] = None,
        threads: Optional[int] = None,
        emit: Optional[List[str]] = None,
        strict: Optional[bool] = None,
    ) -> "RunConfig":
        for name, value in (
            ("seed", seed),
            ("mode", mode),
            ("sweeps", sweeps),
            ("threads", threads),
            ("emit", emit),
            ("strict", strict),
        ):
            if value is not None:
                setattr(self, name, _coerce(name, value, None, None))

    def _validate(self) -> None:
        if self.element_count % 2:
            raise UserConfigError(
                f"`element_count` must be even, got {self.element_count}.",
                keys=("element_count",),
            )
        if self.roi_center_m[1] + self.roi_size_m[1] / 2 >= 0:
            raise UserConfigError(
                "The ROI must lie entirely below the plane (y < 0): "
                + f"center {self.roi_center_m}, size {self.roi_size_m}.",
                keys=("roi_center_m", "roi_size_m"),
            )
        if abs(self.bs_center_deg) + self.bs_width_deg / 2 >= 90:
            raise UserConfigError(
                "The BS sweep must stay inside (−90°, 90°): "
                + f"|{self.bs_center_deg}| + {self.bs_width_deg}/2 ≥ 90.",
                keys=("bs_center_deg", "bs_width_deg"),
            )
        if self.bs_antennas is not None and self.beamwidth_deg is not None:
            raise UserConfigError(
                "Set only one of `bs_antennas` and `beamwidth_deg`.",
                keys=("bs_antennas", "beamwidth_deg"),
            )
        if self.bs_antennas is None and self.beamwidth_deg is None:
            raise UserConfigError(
                "One of `bs_antennas` or `beamwidth_deg` is required.",
                keys=("bs_antennas", "beamwidth_deg"),
            )
        if self.noise and self.echo_mode != "sampled":
            raise UserConfigError(
                "`noise = true` needs `echo_mode = sampled`.", keys=("noise", "echo_mode")
            )
        if self.image_roi_center_m != AUTO or self.image_roi_size_m != AUTO:
            center = self.roi_center_m if self.image_roi_center_m == AUTO else self.image_roi_center_m
            size = self.roi_size_m if self.image_roi_size_m == AUTO else self.image_roi_size_m
            if center[1] + size[1] / 2 >= 0:
                raise UserConfigError(
                    "The image ROI must lie entirely below the plane.",
                    keys=("image_roi_center_m", "image_roi_size_m", "roi_center_m", "roi_size_m"),
                )

    # --- Serialization ---

    def _to_wire_format(self) -> dict:
        return {f.name: _plain(getattr(self, f.name)) for f in fields(self)}

    @classmethod
    def _from_wire_format(cls, wire: dict) -> "RunConfig":
        return parse_config_mapping(
            {k: v for k, v in wire.items() if not k.startswith("_")}, {}, None
        )


def _plain(value):
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


# --- Parsing ---

_NUMBER = (int, float)


def _fail(name: str, message: str, lines: Dict[str, int], path: Optional[str]):
    raise UserConfigError(f"`{name}`: {message}", path=path, line=lines.get(name))


def _coerce(name: str, raw: Any, lines: Optional[Dict[str, int]], path: Optional[str]):
    """Checks one raw value against the metadata of field `name`."""
    lines = lines or {}
    spec = RunConfig.__dataclass_fields__[name].metadata
    kind = spec["kind"]
    if raw == AUTO:
        if spec["auto"]:
            return AUTO
        _fail(name, "does not accept `auto`.", lines, path)
    if raw is None:
        if spec["nullable"]:
            return None
        _fail(name, "is required.", lines, path)

    if kind == "float":
        if isinstance(raw, bool) or not isinstance(raw, _NUMBER) or not np.isfinite(raw):
            _fail(name, f"expected a finite number, got {raw!r}.", lines, path)
        value = float(raw)
    elif kind == "int":
        if isinstance(raw, bool) or not isinstance(raw, int):
            _fail(name, f"expected an integer, got {raw!r}.", lines, path)
        value = int(raw)
    elif kind == "bool":
        if not isinstance(raw, bool):
            _fail(name, f"expected true or false, got {raw!r}.", lines, path)
        value = raw
    elif kind == "choice":
        if raw not in spec["choices"]:
            _fail(name, f"expected one of {', '.join(spec['choices'])}, got {raw!r}.", lines, path)
        value = raw
    elif kind == "point":
        if (
            not isinstance(raw, list)
            or len(raw) != 2
            or not all(isinstance(v, _NUMBER) and not isinstance(v, bool) for v in raw)
        ):
            _fail(name, f"expected [x, y] in meters, got {raw!r}.", lines, path)
        value = [float(v) for v in raw]
    elif kind == "targets":
        if not isinstance(raw, list) or not all(
            isinstance(t, list)
            and len(t) in (2, 4)
            and all(isinstance(v, _NUMBER) and not isinstance(v, bool) for v in t)
            for t in raw
        ):
            _fail(
                name,
                "expected a list of [x, y] or [x, y, re(Γ), im(Γ)] entries.",
                lines,
                path,
            )
        value = [[float(v) for v in t] for t in raw]
    elif kind == "square":
        if (
            not isinstance(raw, list)
            or len(raw) != 4
            or not all(isinstance(v, _NUMBER) and not isinstance(v, bool) for v in raw)
            or raw[2] <= 0
            or raw[3] <= 0
        ):
            _fail(
                name,
                "expected [center_x, center_y, side, spacing] with side, spacing > 0.",
                lines,
                path,
            )
        value = [float(v) for v in raw]
    elif kind == "emit":
        items = raw.split(",") if isinstance(raw, str) else raw
        if not isinstance(items, list) or not all(
            isinstance(i, str) and i.strip() in spec["choices"] for i in items
        ):
            _fail(name, f"expected a subset of {', '.join(spec['choices'])}, got {raw!r}.", lines, path)
        value = sorted({i.strip() for i in items}, key=EMIT_CHOICES.index)
    else:
        raise ValueError(f"Unhandled config kind {kind}")

    check = spec["check"]
    if check is not None and not check(value):
        _fail(name, f"must be {spec['hint']}, got {raw!r}.", lines, path)
    return value


def parse_config_mapping(
    mapping: Dict[str, Any], lines: Dict[str, int], path: Optional[str]
) -> RunConfig:
    known = RunConfig.__dataclass_fields__
    values = {}
    for name, raw in mapping.items():
        if name not in known or name == "NON_EFFECTIVE_KEYS":
            raise UserConfigError(
                f"Unknown key `{name}`.", path=path, line=lines.get(name)
            )
        values[name] = _coerce(name, raw, lines, path)
    if values.get("beamwidth_deg") is not None and "bs_antennas" not in values:
        values["bs_antennas"] = None
    config = RunConfig(**values)
    try:
        config._validate()
    except UserConfigError as err:
        # the latest line among the keys involved
        located = [lines[k] for k in err.keys if k in lines]
        raise UserConfigError(
            err.message, path=path, line=max(located) if located else None, keys=err.keys
        ) from None
    return config


_KEY_VALUE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config_text(text: str, path: Optional[str] = None) -> RunConfig:
    """
    Parses either a flat JSON object or `key = value` lines. Values in the
    line syntax are JSON literals when they parse as such, bare strings
    otherwise; `#` starts a comment.
    """
    if text.lstrip().startswith("{"):
        try:
            mapping = json.loads(text)
        except json.JSONDecodeError as err:
            raise UserConfigError(f"Invalid JSON: {err.msg}.", path=path, line=err.lineno)
        if not isinstance(mapping, dict):
            raise UserConfigError("Expected a JSON object.", path=path, line=1)
        lines = {}
        for name in mapping:
            match = re.search(r'"' + re.escape(name) + r'"\s*:', text)
            if match:
                lines[name] = text.count("\n", 0, match.start()) + 1
        return parse_config_mapping(mapping, lines, path)

    mapping: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        match = _KEY_VALUE.match(line)
        if not match:
            raise UserConfigError(
                f"Expected `key = value`, got {raw_line.strip()!r}.", path=path, line=number
            )
        name, value = match.group(1), match.group(2)
        if name in mapping:
            raise UserConfigError(
                f"Duplicate key `{name}` (first set on line {lines[name]}).",
                path=path,
                line=number,
            )
        if value == "":
            raise UserConfigError(f"Key `{name}` has no value.", path=path, line=number)
        mapping[name] = _parse_value(value)
        lines[name] = number
    return parse_config_mapping(mapping, lines, path)


def preset_names() -> List[str]:
    folder = resources.files(__package__) / "presets"
    return sorted(
        p.name[: -len(PRESET_SUFFIX)]
        for p in folder.iterdir()
        if p.name.endswith(PRESET_SUFFIX)
    )


def load_config(source: Union[str, Path]) -> RunConfig:
    """Loads a config from a file path or from the name of a shipped preset."""
    path = Path(source)
    if path.is_file():
        return parse_config_text(path.read_text(encoding="utf-8"), str(path))
    name = str(source)
    if name.endswith(PRESET_SUFFIX):
        name = name[: -len(PRESET_SUFFIX)]
    if name in preset_names():
        preset = resources.files(__package__) / "presets" / (name + PRESET_SUFFIX)
        return parse_config_text(preset.read_text(encoding="utf-8"), f"<preset {name}>")
    raise UserConfigError(
        f"No config file or preset named {str(source)!r}. "
        + f"Presets: {', '.join(preset_names())}.",
        path=str(source),
    )
