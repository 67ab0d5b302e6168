import sys
from typing import *

import pandas as pd

from ..imaging.export import image_frame
from ..imaging.metrics import ImageMetrics
from .pipeline import PipelineOutput


class RunResults:
    """
    Represents the image, metrics and warnings from an invocation of `run`.

    Warnings are printed to stderr the first time results are accessed,
    once per instance.
    """

    def __init__(
        self,
        output: PipelineOutput,
        *,
        print_warnings: bool = True,
        print_summary: bool = False,
    ):
        self._output = output
        self._has_printed_warnings = not print_warnings
        self._has_printed_summary = not print_summary
        self._cached_df: Optional[pd.DataFrame] = None

    # --- Public API ---

    @property
    def output(self) -> PipelineOutput:
        return self._output

    @property
    def metrics(self) -> ImageMetrics:
        self._show_info_once()
        return self._output.metrics

    @property
    def df(self) -> pd.DataFrame:
        """
        The accumulated image in dB re. its peak; rows are y ascending,
        columns x ascending.
        """
        self._show_info_once()
        if self._cached_df is None:
            self._cached_df = image_frame(self._output.image)
        return self._cached_df

    @property
    def warnings(self) -> List[str]:
        return list(self._output.warnings)

    @property
    def artifacts(self) -> Dict[str, str]:
        return {name: str(path) for name, path in self._output.artifacts.items()}

    # --- Internals ---

    def _show_info_once(self):
        if not self._has_printed_warnings:
            for warning in self._output.warnings:
                print("WARN: " + warning, file=sys.stderr)
            self._has_printed_warnings = True

        if not self._has_printed_summary:
            m = self._output.metrics
            info_str = self._output.config.mode.upper()
            for key, value in (
                ("sweeps", self._output.schedule.sweep_count),
                ("peak", f"({m.peak_x_m:.3f}, {m.peak_y_m:.3f}) m"),
                ("width_x", f"{m.width_x_m:.4f} m"),
                ("width_y", f"{m.width_y_m:.4f} m"),
                ("pslr", f"{m.pslr_db:.2f} dB"),
            ):
                info_str += f"[{key}: {value}]"
            print(info_str)
            self._has_printed_summary = True
