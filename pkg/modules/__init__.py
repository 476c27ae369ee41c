#!/usr/bin/env python3
"""
Initialization module for nilcohom modules.
"""

from .algebra_core import LatticeData, NilpotentLieAlgebra
from .coadjoint import LinearForm
from .config_manager import ConfigManager, builtin_algebra, load_algebra
from .pipeline import PipelineRunner, run
from .report_manager import ReportManager
from .constants import *

__all__ = [
    "NilpotentLieAlgebra",
    "LatticeData",
    "LinearForm",
    "ConfigManager",
    "ReportManager",
    "PipelineRunner",
    "builtin_algebra",
    "load_algebra",
    "run",
    "constants",
]
