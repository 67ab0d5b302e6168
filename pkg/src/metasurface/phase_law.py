from dataclasses import dataclass
from typing import *

import numpy as np

from ..utils.error import GeometryError

if TYPE_CHECKING:
    from ..design.codebook import ReflectionCodebook

# Inner values closer than this to a midpoint between two grid angles are ties.
QUANTIZER_TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PhaseLawParams:
    """
    Constants of the space-time angular difference law

        Δθ(x, τ) = θ̄_o − θ̄_i + (Δθ_o/2)·cos(2πx/Λ_x − 2πτ/Λ_τ)

    `temporal_period` may be `inf` for a plane that never reconfigures.
    `sweep_duration` is T, which turns a sweep index into an effective time.
    """

    bs_center: float
    reflection_center: float
    reflection_width: float
    spatial_period: float
    temporal_period: float
    reflection_codebook: "ReflectionCodebook"
    sweep_duration: float

    def __post_init__(self):
        if not self.spatial_period > 0:
            raise GeometryError(f"Λ_x must be > 0, got {self.spatial_period}.")
        if not self.temporal_period > 0:
            raise GeometryError(f"Λ_τ must be > 0, got {self.temporal_period}.")
        if len(self.reflection_codebook.angles) == 0:
            raise GeometryError("The reflection codebook is empty.")

    @property
    def is_static(self) -> bool:
        return np.isinf(self.temporal_period)

    @property
    def difference_grid(self) -> np.ndarray:
        """Codebook-equivalent angular differences `q − θ̄_i`, ascending."""
        return np.sort(np.asarray(self.reflection_codebook.angles) - self.bs_center)


def angular_difference(x, tau, params: PhaseLawParams):
    """Unquantized Δθ(x, τ). Broadcasts over `x` and `tau`."""
    x = np.asarray(x, dtype=float)
    tau = np.asarray(tau, dtype=float)
    temporal = 0.0 if params.is_static else 2 * np.pi * tau / params.temporal_period
    argument = 2 * np.pi * x / params.spatial_period - temporal
    return (
        params.reflection_center
        - params.bs_center
        + params.reflection_width / 2 * np.cos(argument)
    )


def quantize_to_grid(values, grid: np.ndarray):
    """
    Nearest neighbour of each value on an ascending `grid`; a value equidistant
    (within `QUANTIZER_TIE_TOLERANCE`) from two grid points goes to the smaller.
    """
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if len(grid) == 1:
        return np.full_like(values, grid[0])
    upper = np.clip(np.searchsorted(grid, values, side="left"), 1, len(grid) - 1)
    lower = upper - 1
    dist_lo = np.abs(values - grid[lower])
    dist_hi = np.abs(grid[upper] - values)
    take_lower = dist_lo <= dist_hi + QUANTIZER_TIE_TOLERANCE
    return np.where(take_lower, grid[lower], grid[upper])


def quantized_angular_difference(x, tau, params: PhaseLawParams):
    """Δθ(x, τ) snapped onto the grid of differences realizable by the codebook."""
    return quantize_to_grid(angular_difference(x, tau, params), params.difference_grid)


def phase_gradient(delta_mod, bs_center: float, wavelength: float):
    """dφ/dx = (2π/λ0)·[sin θ̄_i − sin(θ̄_i + Δθ_mod)] in rad/m."""
    return (
        2 * np.pi / wavelength * (np.sin(bs_center) - np.sin(bs_center + delta_mod))
    )


def phase_profile(
    x, delta_mod, bs_center: float, wavelength: float, *, wrap: bool = True
):
    """
    Element phases of a constant-gradient module steering `θ̄_i → θ̄_i + Δθ_mod`.
    `x` is measured from the module centre. With `wrap`, phases are in [0, 2π).
    """
    phases = phase_gradient(delta_mod, bs_center, wavelength) * np.asarray(
        x, dtype=float
    )
    return np.mod(phases, 2 * np.pi) if wrap else phases


def reflected_direction(theta_i, delta_mod, bs_center: float):
    """
    Generalized reflection law: `sin θ_o = sin θ_i − sin θ̄_i + sin(θ̄_i + Δθ_mod)`.
    Directions past grazing come back as NaN.
    """
    sine = np.sin(theta_i) - np.sin(bs_center) + np.sin(bs_center + delta_mod)
    with np.errstate(invalid="ignore"):
        return np.where(np.abs(sine) <= 1, np.arcsin(np.clip(sine, -1, 1)), np.nan)
