"""Logging setup: standard library records are forwarded to loguru."""

import logging
import sys

from loguru import logger

TEXT_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan> - <level>{message}</level>"
)


class InterceptHandler(logging.Handler):
    """Send standard logging records to the loguru logger."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        # Find the caller so loguru reports the right module
        frame, depth = logging.currentframe(), 2
        while frame is not None and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(
            level, record.getMessage()
        )


def setup_logging(level: str = "INFO", fmt: str = "TEXT") -> None:
    """
    Configure a single stderr sink and route the ``logging`` module into it.

    Args:
        level: Minimum level name (DEBUG, INFO, WARNING, ...)
        fmt: ``TEXT`` for human-readable lines, ``JSON`` for serialized records
    """
    logger.remove()
    if fmt.upper() == "JSON":
        logger.add(sys.stderr, level=level.upper(), serialize=True)
    else:
        logger.add(sys.stderr, level=level.upper(), format=TEXT_FORMAT)

    root = logging.getLogger()
    if not any(isinstance(h, InterceptHandler) for h in root.handlers):
        root.addHandler(InterceptHandler())
    root.setLevel(level.upper())
