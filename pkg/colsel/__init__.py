"""
colsel - Greedy Column Subset Selection

Single-machine, distributed and sketched greedy selection of columns of B
that best reconstruct a target matrix A, plus brute-force ground truth for
checking the approximation bounds on small instances.
"""

__version__ = "0.1.0"

from .main import main
from .config import Settings, get_settings

__all__ = ["main", "Settings", "get_settings", "__version__"]
