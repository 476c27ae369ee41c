#!/usr/bin/env python3
"""
Constants module for nilcohom
Centralized location for all constants used throughout the application.
"""

from typing import Final


# File paths
OUTPUT_DIR: Final[str] = "output"
REPORT_FILE: Final[str] = "report.json"
MANIFEST_FILE: Final[str] = "manifest.json"
LOG_FILE: Final[str] = "run.log"
ALGEBRA_SCHEMA: Final[str] = "algebra_schema.json"
CONFIG_SCHEMA: Final[str] = "config_schema.json"

# Exact algebra
MAX_BCH_STEP: Final[int] = 4

# Representation grid
DEFAULT_GRID_N: Final[int] = 4096
DEFAULT_GRID_L: Final[float] = 12.0
DEFAULT_HERMITE_MODES: Final[int] = 384
DEFAULT_TAIL_TOL: Final[float] = 1e-12
DEFAULT_NYQUIST_TOL: Final[float] = 1e-10
DEFAULT_ZERO_TOL_REL: Final[float] = 1e-9

# Estimate checks
DEFAULT_ESTIMATE_SLACK: Final[float] = 1e-9
DEFAULT_SCALING_SLACK: Final[float] = 10.0
DEFAULT_ALPHA: Final[float] = 1.5
DEFAULT_BETA: Final[float] = -1.0

# Diophantine scans
DEFAULT_TAU: Final[float] = 0.0
DEFAULT_M_MAX: Final[int] = 1000
DEFAULT_COLLAPSE_RATIO: Final[float] = 0.25
RELATION_TOL: Final[float] = 1e-12
MAX_SCAN_POINTS: Final[int] = 50_000_000
SCAN_BLOCK: Final[int] = 4096

# Nilflow simulation
DEFAULT_T: Final[float] = 100.0
DEFAULT_DT: Final[float] = 0.1
NYQUIST_FRACTION: Final[float] = 0.5
