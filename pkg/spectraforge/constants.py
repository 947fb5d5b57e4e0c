"""spectraforge constants and fixed values."""

import numpy as np

# Floating point
MACHINE_EPSILON = float(np.finfo(np.float64).eps)

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2

# Scalar fields
FIELDS = ["real", "complex"]

# Galerkin
MAX_BASIS_SIZE = 512

# Report formats
REPORT_FORMATS = ["json", "csv"]

# CLI subcommands
SUBCOMMANDS = [
    "check-extreme",
    "facial-dim",
    "perturb",
    "douglas-factor",
    "elliptope-check",
    "hadamard-check",
    "random-correlation",
    "bp-bound",
    "solve-lambda1",
    "solve-entropy",
    "oracle-compare",
]

# Problem definition studies
STUDY_PCA_COVER = "pca_cover"
STUDY_QUANTUM_MOMENTS = "quantum_moments"
