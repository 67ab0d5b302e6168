import importlib.metadata
import platform
from typing import Dict


def get_nlosview_version() -> str:
    try:
        return importlib.metadata.version("nlosview")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


NLOSVIEW_VERSION = get_nlosview_version()


def dependency_versions() -> Dict[str, str]:
    """
    Versions of the interpreter and of the numerical stack, recorded in each
    run manifest so a result can be traced back to the libraries that made it.
    """
    versions = {"python": platform.python_version(), "nlosview": NLOSVIEW_VERSION}
    for dist in ("numpy", "scipy", "pandas", "dataclasses-json"):
        try:
            versions[dist] = importlib.metadata.version(dist)
        except importlib.metadata.PackageNotFoundError:
            versions[dist] = "unknown"
    return versions
