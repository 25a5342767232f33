"""Utility functions for MPC Cluster Tracker."""

from .validators import select_side, validate_snapshot
from .power_utils import db_to_linear, gain_to_power, linear_to_db
from .config_file import load_config_file

__all__ = [
    "select_side",
    "validate_snapshot",
    "db_to_linear",
    "gain_to_power",
    "linear_to_db",
    "load_config_file",
]
