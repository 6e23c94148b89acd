"""Software universe graphs: library dependency and update metrics."""

__version__ = "0.1.0"

from .errors import SugError
from .kernels import BACKEND
from .universe import NodeKey, ProjectView, ReleaseNode, Universe

__all__ = ["BACKEND", "NodeKey", "ProjectView", "ReleaseNode", "SugError", "Universe", "__version__"]
