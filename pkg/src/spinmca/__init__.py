"""Simulator for a memristive-crossbar neural network whose neurons use a
clocked domain-wall interface module to form the column-current difference."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
