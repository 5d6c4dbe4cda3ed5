"""Dense-matrix construction and verification of an oracle-driven search network."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.1.0"

from . import coherence, gates, nmrsim, ntquad, searchnet, spinalg, trotter  # noqa: E402

__all__ = ["coherence", "gates", "nmrsim", "ntquad", "searchnet", "spinalg", "trotter", "__version__"]
