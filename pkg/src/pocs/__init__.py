"""Signal direction recovery from phase-only complex compressive measurements."""
from .kernels import BACKEND
from .linalg import KAPPA, Seed

__version__ = "0.1.0"

__all__ = ["BACKEND", "KAPPA", "Seed", "__version__"]
