"""
Constants used throughout boltzsynth.

This module contains the numeric tolerances, size caps, default sharpness
values, file schema tags and process exit codes shared by every module.
"""

import math

# State-space limits
MAX_UNITS = 24  # dense enumeration cap: 2**24 states
MAX_BOUNDS_N = 64  # formula-only mode for size tables
MATERIALIZE_LIMIT = 12  # widest layer whose transition is built blockwise
TRANSITION_BLOCK_ELEMENTS = 1 << 22

# Tolerances
SUPPORT_EPSILON = 1e-12
NORMALIZATION_TOLERANCE = 1e-9
TARGET_FLOOR = 1e-9
CLAMP_DELTA = 1e-9

# Sharpness defaults
DEFAULT_SHARPNESS = 30.0 * math.log(10.0)
DEFAULT_COPY_SHARPNESS = 40.0

# Calibration
CALIBRATION_TOLERANCE = 1e-10
MAX_CALIBRATION_SWEEPS = 100

# Sequence families: n = 2**(b - 1) + b
MIN_PREFIX_WIDTH = 1
MAX_PREFIX_WIDTH = 5
ADMISSIBLE_WIDTHS = tuple(
    2 ** (b - 1) + b for b in range(MIN_PREFIX_WIDTH, MAX_PREFIX_WIDTH + 1)
)

# Sampling
DEFAULT_SEED = 1234
GENERATOR_NAME = "numpy.random.PCG64"

# File schemas
SCHEMA_DIST = "dist/1"
SCHEMA_RBM = "rbm/1"
SCHEMA_DBN = "dbn/1"
SCHEMA_SUPPORT = "support/1"
SCHEMA_COVER = "cover/1"

# Process exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_NUMERIC = 4
EXIT_DOMAIN = 5

# Settings file, relative to the config root
SETTINGS_FILE = "synthesis.json"
