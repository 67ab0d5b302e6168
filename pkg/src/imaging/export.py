from pathlib import Path
from typing import *

import numpy as np
import pandas as pd

from ..utils.files import atomic_writer
from ..utils.silence import silenced_numeric_warnings
from .grid import ComplexImage

DB_FLOOR = -200.0
DISPLAY_RANGE_DB = 40.0


def normalized_db(image: ComplexImage, floor: float = DB_FLOOR) -> np.ndarray:
    """20·log10(|I| / max|I|), clipped at `floor`; an all-zero image is all floor."""
    magnitude = image.magnitude
    peak = magnitude.max() if magnitude.size else 0.0
    if peak <= 0:
        return np.full(magnitude.shape, floor)
    with silenced_numeric_warnings():
        db = 20 * np.log10(magnitude / peak)
    return np.maximum(np.nan_to_num(db, nan=floor, neginf=floor), floor)


def image_frame(image: ComplexImage) -> pd.DataFrame:
    """Rows are y ascending, columns x ascending, values in dB re. the peak."""
    return pd.DataFrame(normalized_db(image))


def write_image_csv(image: ComplexImage, path: Union[str, Path]) -> Path:
    with atomic_writer(path, "w") as handle:
        image_frame(image).to_csv(handle, header=False, index=False, float_format="%.6f")
    return Path(path)


def pgm_bytes(image: ComplexImage, dynamic_range_db: float = DISPLAY_RANGE_DB) -> bytes:
    """
    8-bit binary PGM: 255 at the peak, 0 at or below `−dynamic_range_db`.
    The top row is the largest y, so the picture is upright.
    """
    db = np.clip(normalized_db(image), -dynamic_range_db, 0.0)
    levels = np.rint((db + dynamic_range_db) / dynamic_range_db * 255).astype(np.uint8)
    ny, nx = levels.shape
    header = f"P5\n{nx} {ny}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(levels[::-1]).tobytes()


def write_image_pgm(image: ComplexImage, path: Union[str, Path]) -> Path:
    with atomic_writer(path, "wb") as handle:
        handle.write(pgm_bytes(image))
    return Path(path)


def write_json_document(document: Any, path: Union[str, Path]) -> Path:
    """Writes a `dataclass_json` document atomically."""
    with atomic_writer(path, "w") as handle:
        handle.write(document.to_json(indent=2, sort_keys=True))
        handle.write("\n")
    return Path(path)
