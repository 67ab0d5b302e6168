import json

import numpy as np
import pytest

from nlosview.imaging import (
    ComplexImage,
    ImageGrid,
    MetricsDocument,
    image_metrics,
    normalized_db,
    width_x_by_sweeps,
    write_image_csv,
    write_image_pgm,
)
from nlosview.imaging.metrics import half_power_width, peak_sidelobe_ratio
from nlosview.utils.error import GeometryError


def make_image(values, origin=(0.0, -1.0), spacing=0.1):
    values = np.asarray(values, dtype=complex)
    ny, nx = values.shape
    return ComplexImage(values=values, grid=ImageGrid(origin, spacing, nx, ny))


def point_image(corner=0.0):
    values = np.zeros((5, 5))
    values[2, 2] = 1.0
    values[0, 0] = corner
    return make_image(values)


def test_half_power_width_interpolates():
    magnitude = np.sqrt([0.0, 0.25, 1.0, 0.25, 0.0])
    assert half_power_width(magnitude, 2, 0.01) == pytest.approx(0.04 / 3)


def test_half_power_width_is_at_least_one_pixel():
    assert half_power_width(np.array([0.0, 0.0, 1.0, 0.0, 0.0]), 2, 0.1) == pytest.approx(0.1)
    # a flat profile runs off both edges
    assert half_power_width(np.ones(4), 1, 0.1) == pytest.approx(0.3)


def test_peak_sidelobe_ratio():
    magnitude = point_image(corner=0.1).magnitude
    assert peak_sidelobe_ratio(magnitude, (2, 2)) == pytest.approx(-20.0)
    assert peak_sidelobe_ratio(point_image().magnitude, (2, 2)) == float("-inf")


def test_image_metrics_of_a_point():
    metrics = image_metrics(point_image(corner=0.1))
    assert (metrics.peak_x_m, metrics.peak_y_m) == pytest.approx((0.2, -0.8))
    assert metrics.width_x_m == pytest.approx(0.1)
    assert metrics.width_y_m == pytest.approx(0.1)
    assert metrics.pslr_db == pytest.approx(-20.0)
    assert metrics.peak_magnitude == 1.0


def test_all_zero_image_cannot_be_measured():
    with pytest.raises(GeometryError):
        image_metrics(make_image(np.zeros((3, 3))))


def test_width_by_sweeps_accumulates():
    image = point_image()
    widths = width_x_by_sweeps([image, image.scaled(2.0), image.scaled(-1.0)])
    assert len(widths) == 3
    assert widths == pytest.approx([0.1, 0.1, 0.1])


def test_normalized_db_has_a_floor():
    image = make_image([[1.0, 0.1, 0.0]])
    np.testing.assert_allclose(normalized_db(image), [[0.0, -20.0, -200.0]])
    np.testing.assert_array_equal(normalized_db(make_image(np.zeros((2, 2))), floor=-90), -90)


def test_image_csv(tmp_path):
    path = write_image_csv(make_image([[1.0, 0.1, 0.0], [0.0, 0.0, 1.0]]), tmp_path / "image.csv")
    lines = path.read_text().splitlines()
    assert lines == [
        "0.000000,-20.000000,-200.000000",
        "-200.000000,-200.000000,0.000000",
    ]


def test_image_pgm_is_upright(tmp_path):
    image = make_image([[1.0, 0.0, 0.0], [0.0, 0.0, 0.1]])
    data = write_image_pgm(image, tmp_path / "image.pgm").read_bytes()
    header = b"P5\n3 2\n255\n"
    assert data.startswith(header)
    assert list(data[len(header):]) == [0, 0, 128, 255, 0, 0]


def test_metrics_document_json():
    metrics = image_metrics(point_image(corner=0.1))
    document = MetricsDocument(mode="multiview", sweeps=3, seed=0, metrics=metrics)
    loaded = json.loads(document.to_json())
    assert loaded["metrics"]["pslr_db"] == pytest.approx(-20.0)
    assert "_version" in loaded
    assert MetricsDocument.from_json(document.to_json()).metrics == metrics


def sinc_image(a, b, center=(0.0, -2.0)):
    grid = ImageGrid.around(center, 0.6, 0.01)
    xs, ys = grid.mesh()
    values = np.sinc((xs - center[0]) / a) * np.sinc((ys - center[1]) / b)
    return ComplexImage(values=values.astype(complex), grid=grid)


def test_sinc_widths_match_the_half_power_points():
    # |sinc(x/a)|² falls to one half at x = ±0.443·a
    metrics = image_metrics(sinc_image(0.2, 0.3))
    assert (metrics.peak_x_m, metrics.peak_y_m) == pytest.approx((0.0, -2.0), abs=1e-9)
    assert metrics.width_x_m == pytest.approx(0.886 * 0.2, abs=0.01)
    assert metrics.width_y_m == pytest.approx(0.886 * 0.3, abs=0.01)
    assert metrics.pslr_db == pytest.approx(-13.26, abs=0.1)


def test_metrics_ignore_a_complex_scale():
    image = sinc_image(0.2, 0.3)
    plain = image_metrics(image)
    scaled = image_metrics(image.scaled(3 - 4j))
    assert scaled.width_x_m == pytest.approx(plain.width_x_m, rel=1e-12)
    assert scaled.width_y_m == pytest.approx(plain.width_y_m, rel=1e-12)
    assert scaled.pslr_db == pytest.approx(plain.pslr_db, abs=1e-9)
    assert (scaled.peak_x_m, scaled.peak_y_m) == (plain.peak_x_m, plain.peak_y_m)
    assert scaled.peak_magnitude == pytest.approx(5 * plain.peak_magnitude)
