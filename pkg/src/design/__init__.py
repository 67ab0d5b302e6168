from .codebook import (
    BsCodebook,
    ReflectionCodebook,
    build_bs_codebook,
    build_reflection_codebook,
    reflection_codebook_with_count,
)
from .bounds import (
    auto_reflection_center,
    bs_sampling_bound,
    derive_periods_and_module_size,
    propagation_phase,
    propagation_phase_derivative,
    reflection_sampling_bound,
    reflection_width_for_roi,
    smallest_reflection_count,
)
from .report import DesignReport, SystemDesign, design_system

__all__ = [
    "BsCodebook",
    "DesignReport",
    "ReflectionCodebook",
    "SystemDesign",
    "auto_reflection_center",
    "bs_sampling_bound",
    "build_bs_codebook",
    "build_reflection_codebook",
    "derive_periods_and_module_size",
    "design_system",
    "propagation_phase",
    "propagation_phase_derivative",
    "reflection_codebook_with_count",
    "reflection_sampling_bound",
    "reflection_width_for_roi",
    "smallest_reflection_count",
]
