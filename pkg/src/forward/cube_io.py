import struct
from pathlib import Path
from typing import *

import numpy as np

from ..utils.files import atomic_writer
from ..utils.serializable import NLOSVIEW_WIRE_VERSION, WireFormatVersionError
from .acquisition import EchoCube, FastTimeWindow

CUBE_MAGIC = b"NLOSCUBE"
# magic, version, mode, rows, columns, bandwidth, sample rate, window start,
# noise power, seed
_HEADER = struct.Struct("<8sIIQQddddQ")
_MODES = {"analytic": 0, "sampled": 1}
_MODE_NAMES = {v: k for k, v in _MODES.items()}


def cube_to_bytes(cube: EchoCube) -> bytes:
    """
    Flat little-endian layout, documented in `docs/echo_cube.md`: a fixed
    header, then per-row `sweep_index` (int64), `snapshot_index` (int64) and
    `theta_i` (float64), then the payload as interleaved re/im float64.
    """
    rows = len(cube)
    if cube.mode == "sampled":
        payload = [np.ascontiguousarray(cube.samples, dtype="<c16")]
        columns = cube.window.sample_count
        rate, start = cube.window.sample_rate, cube.window.start
    else:
        payload = [
            np.ascontiguousarray(cube.amplitudes, dtype="<c16"),
            np.ascontiguousarray(cube.delays, dtype="<f8"),
        ]
        columns = cube.amplitudes.shape[1] if cube.amplitudes is not None else 0
        rate, start = 0.0, 0.0
    header = _HEADER.pack(
        CUBE_MAGIC,
        NLOSVIEW_WIRE_VERSION,
        _MODES[cube.mode],
        rows,
        columns,
        cube.bandwidth,
        rate,
        start,
        cube.noise_power,
        cube.seed,
    )
    meta = [
        np.ascontiguousarray(cube.sweep_index, dtype="<i8"),
        np.ascontiguousarray(cube.snapshot_index, dtype="<i8"),
        np.ascontiguousarray(cube.theta_i, dtype="<f8"),
    ]
    return header + b"".join(a.tobytes() for a in meta + payload)


def cube_from_bytes(data: bytes) -> EchoCube:
    if len(data) < _HEADER.size:
        raise ValueError("Truncated echo cube: the header is incomplete.")
    magic, version, mode, rows, columns, bandwidth, rate, start, noise, seed = (
        _HEADER.unpack_from(data)
    )
    if magic != CUBE_MAGIC:
        raise ValueError("Not an echo cube file (bad magic bytes).")
    if version != NLOSVIEW_WIRE_VERSION:
        raise WireFormatVersionError(expected=NLOSVIEW_WIRE_VERSION, found=version)
    if mode not in _MODE_NAMES:
        raise ValueError(f"Unknown echo cube mode {mode}.")
    offset = _HEADER.size

    def take(dtype: str, count: int, shape=None) -> np.ndarray:
        nonlocal offset
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
        offset += arr.nbytes
        return arr.reshape(shape) if shape is not None else arr.copy()

    try:
        sweep_index = take("<i8", rows)
        snapshot_index = take("<i8", rows)
        theta_i = take("<f8", rows)
        if _MODE_NAMES[mode] == "sampled":
            samples = take("<c16", rows * columns, (rows, columns)).copy()
            extra = dict(
                samples=samples,
                window=FastTimeWindow(start=start, sample_rate=rate, sample_count=columns),
            )
        else:
            extra = dict(
                amplitudes=take("<c16", rows * columns, (rows, columns)).copy(),
                delays=take("<f8", rows * columns, (rows, columns)).copy(),
            )
    except ValueError as err:
        raise ValueError(f"Truncated echo cube payload: {err}") from err
    if offset != len(data):
        raise ValueError(f"Echo cube has {len(data) - offset} unexpected trailing bytes.")
    return EchoCube(
        mode=_MODE_NAMES[mode],
        bandwidth=bandwidth,
        sweep_index=sweep_index,
        snapshot_index=snapshot_index,
        theta_i=theta_i,
        noise_power=noise,
        seed=seed,
        **extra,
    )


def write_cube(cube: EchoCube, path: Union[str, Path]) -> Path:
    with atomic_writer(path, "wb") as handle:
        handle.write(cube_to_bytes(cube))
    return Path(path)


def read_cube(path: Union[str, Path]) -> EchoCube:
    return cube_from_bytes(Path(path).read_bytes())
