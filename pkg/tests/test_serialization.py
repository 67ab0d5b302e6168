import json

import numpy as np
import pytest

from nlosview.scene import Scene, Target
from nlosview.utils.serializable import Serializable, WireFormatVersionError
from nlosview.utils.stable_key import stable_key_for_wire


def test_target_wire_format():
    target = Target(position=(9.5, -14.0), reflectivity=0.5 - 0.25j)
    wire = target._to_wire_format()
    assert wire["_version"] == 1
    assert wire["reflectivity"] == {"$typeKey": "py.complex", "re": 0.5, "im": -0.25}
    assert Target._from_wire_format(json.loads(json.dumps(wire))) == target


def test_scene_wire_format(reference_scene):
    wire = json.loads(json.dumps(reference_scene._to_wire_format()))
    assert wire["elementCount"] == 320
    assert wire["targets"][0]["_version"] == 1
    assert Scene._from_wire_format(wire) == reference_scene


def test_wire_version_is_checked(reference_scene):
    wire = reference_scene._to_wire_format()
    wire["_version"] = 2
    with pytest.raises(WireFormatVersionError) as info:
        Scene._from_wire_format(wire)
    assert info.value.found_version == 2
    assert "newer version" in str(info.value)
    del wire["_version"]
    with pytest.raises(WireFormatVersionError):
        Scene._from_wire_format(wire)


def test_primitive_values():
    array = np.array([1 + 2j, 3.0])
    wire = Serializable._primitive_to_wire_format(array)
    assert wire["$typeKey"] == "np.ndarray"
    np.testing.assert_array_equal(Serializable._primitive_from_wire_format(wire), array)
    assert Serializable._primitive_to_wire_format(np.int64(3)) == 3
    with pytest.raises(ValueError):
        Serializable._primitive_from_wire_format({"$typeKey": "py.set"})


def test_stable_key_ignores_key_order():
    assert stable_key_for_wire({"a": 1, "b": [1, 2]}) == stable_key_for_wire({"b": [1, 2], "a": 1})
    assert stable_key_for_wire({"a": 1}) != stable_key_for_wire({"a": 2})
