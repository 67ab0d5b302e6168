from .design import DesignReport, design_system
from .run.config import RunConfig, load_config
from .run.context import RunContext
from .run.pipeline import design_only, run, simulate
from .run.results import RunResults
from .scene import Roi, Scene, Target

__all__ = [
    "DesignReport",
    "Roi",
    "RunConfig",
    "RunContext",
    "RunResults",
    "Scene",
    "Target",
    "design_only",
    "design_system",
    "load_config",
    "run",
    "simulate",
]

# standard way to export version is as `__version__` for the root package
from .utils.version import NLOSVIEW_VERSION as __version__
