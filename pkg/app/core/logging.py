# app/core/logging.py

from __future__ import annotations

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """
    Install one stream handler on the `app` logger.

    Safe to call repeatedly; later calls only change the level.
    """
    logger = logging.getLogger("app")
    logger.setLevel(level.upper())
    if not any(getattr(h, "_neuroevo", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._neuroevo = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
