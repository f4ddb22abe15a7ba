"""
Logging setup for the real subbundle lab.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import logging

from rich.console import Console
from rich.logging import RichHandler

LOG_FORMAT = "%(name)s: %(message)s"


def configure_logging(level: int = logging.WARNING) -> None:
    """
    Route log records to stderr through rich.

    Calling it again only updates the level; handlers are not stacked.

    Args:
        level: Root log level for the lab's loggers
    """
    root = logging.getLogger("real_subbundle_lab")
    root.setLevel(level)
    if not any(isinstance(h, RichHandler) for h in root.handlers):
        handler = RichHandler(
            console=Console(stderr=True),
            show_path=False,
            rich_tracebacks=False,
        )
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
