from dataclasses import dataclass
from typing import *

import numpy as np
from scipy.constants import speed_of_light

from ..scene.geometry import (
    element_index_to_array_index,
    illuminated_set,
    incident_distance,
    reflected_distance,
)
from ..scene.scene import Scene, Target


def matched_pulse(dt, bandwidth: float):
    """Unit-peak sinc of bandwidth B, the matched-filtered pulse."""
    return np.sinc(bandwidth * np.asarray(dt, dtype=float))


def dbm_to_watts(dbm: float) -> float:
    return float(10 ** ((dbm - 30) / 10))


@dataclass(frozen=True)
class RadiometricParams:
    """
    Amplitude bookkeeping of the two-hop channel. `tx_scale` multiplies every
    echo; there is no transmit power or antenna gain in the model otherwise.
    """

    tx_scale: float = 1.0

    def alpha(self, reflectivity, incident_range, reflected_range, wavelength: float):
        """α = Γ·(λ0/(4π·D_i))²·(λ0/(4π·D_o))²."""
        return (
            np.asarray(reflectivity)
            * (wavelength / (4 * np.pi * incident_range)) ** 2
            * (wavelength / (4 * np.pi * np.asarray(reflected_range))) ** 2
        )


def plane_response(
    phases: np.ndarray,
    offsets: np.ndarray,
    theta_i: float,
    theta_o,
    wavelength: float,
    *,
    spacing: Optional[float] = None,
):
    """
    S = Σ_m e^{jφ_m}·e^{−jk·o_m·(sin θ_i − sin θ_o)} over the illuminated
    elements, `o_m` being each element's offset from the incidence point.

    With `spacing`, offsets are taken as `o_0 + m·spacing` and the sum is
    evaluated as a polynomial in `e^{−jk·d·(sin θ_i − sin θ_o)}` (Horner),
    which costs one complex multiply per element and per output angle.
    """
    phases = np.asarray(phases, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    theta_o = np.asarray(theta_o, dtype=float)
    k = 2 * np.pi / wavelength
    spatial = np.sin(theta_i) - np.sin(theta_o)
    if len(phases) == 0:
        return np.zeros(theta_o.shape, dtype=complex)
    if spacing is None or len(phases) == 1:
        kernel = np.exp(
            1j * phases - 1j * k * np.multiply.outer(spatial, offsets)
        )
        return kernel.sum(axis=-1)
    z = np.exp(-1j * k * spacing * spatial)
    coefficients = np.exp(1j * phases)
    return np.exp(-1j * k * offsets[0] * spatial) * np.polyval(coefficients[::-1], z)


@dataclass(frozen=True)
class SnapshotGeometry:
    """Everything about one snapshot that does not depend on the target."""

    theta_i: float
    incidence_x: float
    incident_range: float
    illuminated: np.ndarray
    offsets: np.ndarray
    phases: np.ndarray

    @classmethod
    def build(cls, theta_i: float, scene: Scene, element_phases: np.ndarray):
        lit = illuminated_set(theta_i, scene.bs_beamwidth(theta_i), scene)
        idx = element_index_to_array_index(lit, scene)
        incidence_x = scene.source_height * np.tan(theta_i)
        return cls(
            theta_i=float(theta_i),
            incidence_x=float(incidence_x),
            incident_range=float(incident_distance(theta_i, scene)),
            illuminated=lit,
            offsets=scene.element_positions[idx] - incidence_x,
            phases=np.asarray(element_phases)[idx],
        )

    def reflection_angle(self, r_x, r_y):
        return np.arctan((np.asarray(r_x) - self.incidence_x) / np.abs(r_y))

    def response(self, r_x, r_y, scene: Scene):
        """S(τ; r) at points `r`, broadcast over `r_x` and `r_y`."""
        return plane_response(
            self.phases,
            self.offsets,
            self.theta_i,
            self.reflection_angle(r_x, r_y),
            scene.wavelength,
            spacing=scene.element_spacing,
        )

    def round_trip_range(self, r_x, r_y):
        return self.incident_range + reflected_distance(self.incidence_x, (r_x, r_y))


@dataclass(frozen=True)
class EchoContributions:
    amplitudes: np.ndarray
    delays: np.ndarray


def snapshot_echo(
    geometry: SnapshotGeometry,
    targets: Sequence[Target],
    scene: Scene,
    radiometric: RadiometricParams = RadiometricParams(),
) -> EchoContributions:
    """
    Per-target complex amplitude `α·e^{−j(4π/λ0)(D_i+D_o)}·S²` and round-trip
    delay `2(D_i+D_o)/c` of one snapshot. The double sum over element pairs
    factorizes into `S²`.
    """
    if not targets or len(geometry.illuminated) == 0:
        count = len(targets)
        return EchoContributions(
            amplitudes=np.zeros(count, dtype=complex), delays=np.zeros(count)
        )
    positions = np.array([t.position for t in targets], dtype=float)
    reflectivity = np.array([t.reflectivity for t in targets], dtype=complex)
    r_x, r_y = positions[:, 0], positions[:, 1]
    total_range = geometry.round_trip_range(r_x, r_y)
    reflected_range = total_range - geometry.incident_range
    alpha = radiometric.alpha(
        reflectivity, geometry.incident_range, reflected_range, scene.wavelength
    )
    response = geometry.response(r_x, r_y, scene)
    carrier = np.exp(-1j * 4 * np.pi / scene.wavelength * total_range)
    return EchoContributions(
        amplitudes=radiometric.tx_scale * alpha * carrier * response**2,
        delays=2 * total_range / speed_of_light,
    )
