import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import *

import numpy as np
from scipy.constants import speed_of_light

from ..metasurface.plan import PhasePlan
from ..run.context import RunContext, report_warning
from ..scene.geometry import incident_distance, reflected_distance
from ..scene.scene import Roi, Scene
from ..utils.error import GeometryError
from .echo import (
    RadiometricParams,
    SnapshotGeometry,
    dbm_to_watts,
    matched_pulse,
    snapshot_echo,
)
from .schedule import SweepSchedule

logger = logging.getLogger(__name__)

EchoMode = Literal["analytic", "sampled"]

# Snapshots are processed in fixed-size chunks so that the partition of work,
# and hence the output, never depends on the number of workers.
SNAPSHOT_CHUNK = 32
GUARD_PULSE_WIDTHS = 4.0
NARROWBAND_FRACTION = 0.1


@dataclass(frozen=True)
class NoiseSpec:
    enabled: bool = False
    power_dbm: float = -87.0

    @property
    def power_w(self) -> float:
        return dbm_to_watts(self.power_dbm) if self.enabled else 0.0


@dataclass(frozen=True)
class FastTimeWindow:
    start: float
    sample_rate: float
    sample_count: int

    @property
    def times(self) -> np.ndarray:
        return self.start + np.arange(self.sample_count) / self.sample_rate

    @property
    def stop(self) -> float:
        return self.start + (self.sample_count - 1) / self.sample_rate

    def contains(self, delays) -> np.ndarray:
        delays = np.asarray(delays)
        return (delays >= self.start) & (delays <= self.stop)


@dataclass(frozen=True)
class EchoCube:
    """
    Received echoes of an acquisition, one row per scheduled snapshot.

    Analytic cubes keep the `(amplitude, delay)` pair of every target; sampled
    cubes keep base-band samples on `window`. `sweep_index`, `snapshot_index`
    and `theta_i` repeat the schedule rows the cube was simulated on.
    """

    mode: EchoMode
    bandwidth: float
    sweep_index: np.ndarray
    snapshot_index: np.ndarray
    theta_i: np.ndarray
    noise_power: float = 0.0
    seed: int = 0
    # analytic
    amplitudes: Optional[np.ndarray] = None
    delays: Optional[np.ndarray] = None
    # sampled
    samples: Optional[np.ndarray] = None
    window: Optional[FastTimeWindow] = None

    def __len__(self) -> int:
        return len(self.sweep_index)

    @property
    def sweeps(self) -> np.ndarray:
        return np.unique(self.sweep_index)

    def _rows(self, keep: np.ndarray) -> "EchoCube":
        return replace(
            self,
            sweep_index=self.sweep_index[keep],
            snapshot_index=self.snapshot_index[keep],
            theta_i=self.theta_i[keep],
            amplitudes=None if self.amplitudes is None else self.amplitudes[keep],
            delays=None if self.delays is None else self.delays[keep],
            samples=None if self.samples is None else self.samples[keep],
        )

    def split_sweeps(self) -> List["EchoCube"]:
        return [self._rows(self.sweep_index == s) for s in self.sweeps]

    def echo_at(self, row: int, delay) -> np.ndarray:
        """
        y(t, τ) of snapshot `row` at fast times `delay`: the exact matched
        pulse sum in analytic mode, a linear interpolation of the samples
        otherwise. Sampled queries outside the window come back as NaN.
        """
        delay = np.asarray(delay, dtype=float)
        if self.mode == "analytic":
            if self.amplitudes is None or self.amplitudes.shape[1] == 0:
                return np.zeros(delay.shape, dtype=complex)
            pulses = matched_pulse(
                delay[..., None] - self.delays[row], self.bandwidth
            )
            return (pulses * self.amplitudes[row]).sum(axis=-1)
        times = self.window.times
        row_samples = self.samples[row]
        values = np.interp(delay, times, row_samples.real) + 1j * np.interp(
            delay, times, row_samples.imag
        )
        return np.where(self.window.contains(delay), values, np.nan)


def fast_time_window(
    scene: Scene,
    schedule: SweepSchedule,
    roi: Optional[Roi] = None,
    *,
    oversample: float = 8.0,
) -> FastTimeWindow:
    """
    Window covering every round-trip delay between the scheduled incidence
    points and the ROI, plus a guard of 4/B on each side.
    """
    if oversample < 1:
        raise GeometryError(f"Oversampling factor must be ≥ 1, got {oversample}.")
    roi = roi or scene.roi
    angles = np.unique(schedule.theta_i)
    if len(angles) == 0:
        raise GeometryError("Cannot size a fast-time window for an empty schedule.")
    p_x = scene.source_height * np.tan(angles)
    d_i = incident_distance(angles, scene)
    corners = roi.corners()
    (x_lo, x_hi), (_, y_hi) = roi.x_bounds, roi.y_bounds
    farthest = np.max(
        np.hypot(corners[None, :, 0] - p_x[:, None], corners[None, :, 1]), axis=1
    )
    nearest = np.hypot(np.clip(p_x, x_lo, x_hi) - p_x, y_hi)
    guard = GUARD_PULSE_WIDTHS / scene.bandwidth
    start = 2 * float(np.min(d_i + nearest)) / speed_of_light - guard
    stop = 2 * float(np.max(d_i + farthest)) / speed_of_light + guard
    rate = oversample * scene.bandwidth
    return FastTimeWindow(
        start=start,
        sample_rate=rate,
        sample_count=int(np.ceil((stop - start) * rate)) + 1,
    )


def scheduled_delays(scene: Scene, schedule: SweepSchedule) -> np.ndarray:
    """Round-trip delay of every target at every scheduled snapshot, `(rows, targets)`."""
    positions = np.array([t.position for t in scene.targets], dtype=float).reshape(-1, 2)
    theta_i = np.asarray(schedule.theta_i, dtype=float)
    p_x = scene.source_height * np.tan(theta_i)
    total = incident_distance(theta_i, scene)[:, None] + reflected_distance(
        p_x[:, None], (positions[None, :, 0], positions[None, :, 1])
    )
    return 2 * total / speed_of_light


def snapshot_noise(
    seed: int, sweep: int, snapshot: int, count: int, power: float
) -> np.ndarray:
    """
    Circular complex white noise with E|w|² = `power`. The generator is keyed
    by `(seed, sweep, snapshot)` and draws `(re, im)` pairs in sample order,
    so any snapshot can be regenerated on its own.
    """
    key = np.random.SeedSequence(seed, spawn_key=(sweep, snapshot))
    rng = np.random.Generator(np.random.Philox(key))
    pairs = rng.standard_normal((count, 2))
    return np.sqrt(power / 2) * (pairs[:, 0] + 1j * pairs[:, 1])


def spatial_narrowband_ratio(
    geometry: SnapshotGeometry, scene: Scene, reflection_angles: np.ndarray
) -> float:
    """
    Residual delay across the illuminated aperture, `M·d·max(sin θ_i, sin θ_o)/c`,
    relative to a tenth of the pulse length `0.1/B`.
    """
    if len(geometry.illuminated) == 0 or len(reflection_angles) == 0:
        return 0.0
    sines = np.abs(np.concatenate([[np.sin(geometry.theta_i)], np.sin(reflection_angles)]))
    spread = len(geometry.illuminated) * scene.element_spacing * sines.max() / speed_of_light
    return float(spread / (NARROWBAND_FRACTION / scene.bandwidth))


def spatial_narrowband_audit(
    ratios: np.ndarray, context: Optional[RunContext] = None
) -> float:
    """Worst per-snapshot narrowband ratio; one warning if any exceeds 1."""
    ratios = np.asarray(ratios, dtype=float)
    violations = int(np.sum(ratios > 1))
    worst = float(ratios.max()) if len(ratios) else 0.0
    if violations:
        report_warning(
            context,
            "forward",
            "Spatial narrowband condition violated in "
            + f"{violations}/{len(ratios)} snapshots: the residual delay across "
            + f"the illuminated aperture reaches {worst:.2f}× of 0.1/B.",
        )
    return worst


def _simulate_chunk(
    rows: range,
    scene: Scene,
    schedule: SweepSchedule,
    plan: PhasePlan,
    radiometric: RadiometricParams,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    amplitudes = np.zeros((len(rows), len(scene.targets)), dtype=complex)
    delays = np.zeros((len(rows), len(scene.targets)))
    ratios = np.zeros(len(rows))
    positions = np.array([t.position for t in scene.targets], dtype=float).reshape(-1, 2)
    for i, k in enumerate(rows):
        geometry = SnapshotGeometry.build(
            schedule.theta_i[k],
            scene,
            plan.element_phases(schedule.sweep_index[k], schedule.snapshot_index[k]),
        )
        echo = snapshot_echo(geometry, scene.targets, scene, radiometric)
        amplitudes[i], delays[i] = echo.amplitudes, echo.delays
        ratios[i] = spatial_narrowband_ratio(
            geometry, scene, geometry.reflection_angle(positions[:, 0], positions[:, 1])
        )
    return amplitudes, delays, ratios


def _render_chunk(
    rows: range,
    amplitudes: np.ndarray,
    delays: np.ndarray,
    window: FastTimeWindow,
    bandwidth: float,
    schedule: SweepSchedule,
    noise_power: float,
    seed: int,
) -> np.ndarray:
    times = window.times
    out = np.zeros((len(rows), window.sample_count), dtype=complex)
    for i, k in enumerate(rows):
        for amp, delay in zip(amplitudes[k], delays[k]):
            out[i] += amp * matched_pulse(times - delay, bandwidth)
        if noise_power > 0:
            out[i] += snapshot_noise(
                seed,
                int(schedule.sweep_index[k]),
                int(schedule.snapshot_index[k]),
                window.sample_count,
                noise_power,
            )
    return out


def chunked(count: int, size: int = SNAPSHOT_CHUNK) -> List[range]:
    return [range(s, min(s + size, count)) for s in range(0, count, size)]


def map_chunks(func: Callable[[range], Any], count: int, threads: int) -> List[Any]:
    """Applies `func` to fixed-size row chunks; results come back in chunk order."""
    chunks = chunked(count)
    if threads <= 1 or len(chunks) <= 1:
        return [func(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, chunks))


def simulate_acquisition(
    scene: Scene,
    schedule: SweepSchedule,
    plan: PhasePlan,
    radiometric: RadiometricParams = RadiometricParams(),
    noise: NoiseSpec = NoiseSpec(),
    seed: int = 0,
    *,
    mode: EchoMode = "analytic",
    oversample: float = 8.0,
    context: Optional[RunContext] = None,
) -> EchoCube:
    """
    Synthesizes the echo of every scheduled snapshot. Sampled cubes render the
    matched pulses of all targets on one fast-time grid and add noise; both
    are bit-identical for any thread count.
    """
    if mode not in ("analytic", "sampled"):
        raise GeometryError(f"Unknown echo mode {mode!r}.")
    if noise.enabled and mode == "analytic":
        raise GeometryError("Noise can only be added to a sampled echo cube.")
    window = None
    if mode == "sampled":
        window = fast_time_window(scene, schedule, oversample=oversample)
        outside = int(np.sum(~window.contains(scheduled_delays(scene, schedule))))
        if outside:
            raise GeometryError(
                f"{outside} echo delays fall outside the fast-time window; "
                + "targets must lie inside the ROI."
            )
    threads = context.threads if context is not None else 1
    started = time.monotonic()
    logger.info(
        f"Simulating {len(schedule)} snapshot(s), {len(scene.targets)} target(s), "
        + f"{mode} mode, {threads} thread(s)."
    )

    parts = map_chunks(
        lambda rows: _simulate_chunk(rows, scene, schedule, plan, radiometric),
        len(schedule),
        threads,
    )
    n_targets = len(scene.targets)
    amplitudes = (
        np.concatenate([p[0] for p in parts])
        if parts
        else np.zeros((0, n_targets), dtype=complex)
    )
    delays = np.concatenate([p[1] for p in parts]) if parts else np.zeros((0, n_targets))

    spatial_narrowband_audit(
        np.concatenate([p[2] for p in parts]) if parts else np.zeros(0), context
    )

    cube = EchoCube(
        mode=mode,
        bandwidth=scene.bandwidth,
        sweep_index=schedule.sweep_index.copy(),
        snapshot_index=schedule.snapshot_index.copy(),
        theta_i=schedule.theta_i.copy(),
        noise_power=noise.power_w,
        seed=seed,
        amplitudes=amplitudes,
        delays=delays,
    )
    if mode == "sampled":
        rendered = map_chunks(
            lambda rows: _render_chunk(
                rows,
                amplitudes,
                delays,
                window,
                scene.bandwidth,
                schedule,
                noise.power_w,
                seed,
            ),
            len(schedule),
            threads,
        )
        samples = (
            np.concatenate(rendered)
            if rendered
            else np.zeros((0, window.sample_count), dtype=complex)
        )
        cube = replace(cube, samples=samples, window=window)
        _log_snr(amplitudes, noise.power_w, context)

    logger.info(f"Simulation done in {time.monotonic() - started:.2f}s.")
    return cube


def _log_snr(
    amplitudes: np.ndarray, noise_power: float, context: Optional[RunContext]
) -> None:
    if noise_power <= 0 or amplitudes.size == 0:
        return
    peak = float(np.max(np.abs(amplitudes)) ** 2)
    snr_db = 10 * np.log10(peak / noise_power) if peak > 0 else -np.inf
    logger.info(f"Per-sample SNR at the strongest echo: {snr_db:.1f} dB.")
    if snr_db < 0:
        report_warning(
            context,
            "forward",
            f"Per-sample SNR is {snr_db:.1f} dB; raise `tx_scale` or lower the noise.",
        )
