from typing import *

import numpy as np

from .phase_law import phase_profile


def reflected_array_response(
    phases: np.ndarray,
    positions: np.ndarray,
    theta_in: float,
    theta_out,
    wavelength: float,
):
    """
    Array factor `Σ_m e^{jφ_m}·e^{−jk·x_m·(sin θ_in − sin θ_out)}` of a set
    of elements, for one incidence angle and one or many reflection angles.
    Positions are taken relative to their mean so the result is not tilted
    by where the elements sit on the plane.
    """
    phases = np.asarray(phases, dtype=float)
    offsets = np.asarray(positions, dtype=float)
    offsets = offsets - offsets.mean()
    theta_out = np.asarray(theta_out, dtype=float)
    k = 2 * np.pi / wavelength
    spatial = np.sin(theta_in) - np.sin(theta_out)
    kernel = np.exp(
        1j * phases[None, :] - 1j * k * np.multiply.outer(spatial.ravel(), offsets)
    )
    return kernel.sum(axis=1).reshape(theta_out.shape)


def module_steering_peak(
    delta_mod: float,
    module_size: int,
    spacing: float,
    bs_center: float,
    wavelength: float,
    *,
    scan_step: float = np.radians(0.05),
) -> Tuple[float, float]:
    """
    Reflected direction of maximum gain of one module programmed for
    `delta_mod`, illuminated from `bs_center`, found by a dense scan of
    `θ_out` over the visible half-space. Returns `(θ_peak, |gain|)`.
    """
    offsets = (np.arange(module_size) - (module_size - 1) / 2) * spacing
    phases = phase_profile(offsets, delta_mod, bs_center, wavelength)
    scan = np.arange(-np.pi / 2 + scan_step, np.pi / 2, scan_step)
    gain = np.abs(
        reflected_array_response(phases, offsets, bs_center, scan, wavelength)
    )
    best = int(np.argmax(gain))
    return float(scan[best]), float(gain[best])


def module_beamwidth(module_size: int, spacing: float, wavelength: float, theta_out):
    """λ0 / (N_mod·d·cos θ_o)."""
    return wavelength / (module_size * spacing * np.cos(theta_out))
