"""
Configuration package for the real subbundle lab.

Holds the tolerance set and run settings, logging setup, and the fixture
curve records under ``config/curves``.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

from pathlib import Path

from config.log import configure_logging
from config.settings import (
    LabSettings,
    Tolerances,
    get_settings,
    load_settings,
    use_settings,
)

__version__ = "1.0.0"

CURVES_DIR: Path = Path(__file__).resolve().parent / "curves"

__all__ = [
    "CURVES_DIR",
    "LabSettings",
    "Tolerances",
    "configure_logging",
    "get_settings",
    "load_settings",
    "use_settings",
]
