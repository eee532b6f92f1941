"""GA and EDA route discovery across Zone Routing Protocol zones."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
