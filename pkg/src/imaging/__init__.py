from .backprojection import accumulate_sweeps, backproject, backproject_sweeps
from .export import normalized_db, write_image_csv, write_image_pgm
from .grid import ComplexImage, ImageGrid
from .metrics import ImageMetrics, MetricsDocument, image_metrics, width_x_by_sweeps
from .mirror import beam_scan_image, beam_scan_sweeps, mirror_baseline_plan

__all__ = [
    "ComplexImage",
    "ImageGrid",
    "ImageMetrics",
    "MetricsDocument",
    "accumulate_sweeps",
    "backproject",
    "backproject_sweeps",
    "beam_scan_image",
    "beam_scan_sweeps",
    "image_metrics",
    "mirror_baseline_plan",
    "normalized_db",
    "width_x_by_sweeps",
    "write_image_csv",
    "write_image_pgm",
]
