"""
spectraforge - extreme points of spectrahedra, perturbation witnesses and low-rank studies.

This package decides whether a feasible point of a finite-dimensional spectrahedron is an
extreme point, builds explicit even-perturbation witnesses when it is not, and applies the
theory to correlation matrices and to two Galerkin-discretized optimization studies.
"""

from spectraforge._version import __version__, __version_info__
from spectraforge.config import settings
from spectraforge.logger import logger

__all__ = [
    "settings",
    "logger",
    "__version__",
    "__version_info__",
]
