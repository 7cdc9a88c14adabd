from importlib.metadata import PackageNotFoundError, version

try:
    # Change here if project is renamed and does not equal the package name
    dist_name = "rbm-trace"  # i.e. the PyPI name.
    __version__ = version(dist_name)
except PackageNotFoundError:  # pragma: no cover
    __version__ = "unknown"
finally:
    del version, PackageNotFoundError

from . import common, fracdim, geometry, harness, sim, subordination

__all__ = [
    "common",
    "fracdim",
    "geometry",
    "harness",
    "sim",
    "subordination",
]
