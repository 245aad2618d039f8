"""Logging for the cpn_spectra package: rich console output on stderr and an optional log file."""

from __future__ import annotations

import logging
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

PACKAGE_LOGGER = "cpn_spectra"
FILE_FORMAT = "%(asctime)s %(levelname)-8s [%(processName)s] %(name)s: %(message)s"

# Modules whose DEBUG output is only useful when chasing a single query
_NOISY = ("linalg", "polyring")


def setup_logging(debug: bool = False, log_file: Path | None = None) -> logging.Logger:
    """Attach handlers to the package logger, replacing any from an earlier call.

    Args:
        debug: Enable debug level logging
        log_file: Optional file path to write logs to

    Returns:
        The package logger.
    """
    level = logging.DEBUG if debug else logging.INFO
    package = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(package.handlers):
        package.removeHandler(handler)
        handler.close()

    # Results go to stdout, so the console handler stays on stderr
    console_handler = RichHandler(
        rich_tracebacks=True,
        show_time=debug,
        show_path=debug,
        console=Console(stderr=True),
    )
    console_handler.setFormatter(logging.Formatter("%(message)s"))
    package.addHandler(console_handler)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        package.addHandler(file_handler)

    package.setLevel(level)
    for name in _NOISY:
        get_logger(name).setLevel(logging.DEBUG if debug else logging.WARNING)

    if debug:
        package.debug("Debug logging enabled")
        if log_file:
            package.debug(f"Logging to file: {log_file}")
    return package


def get_logger(name: str) -> logging.Logger:
    """Logger under the package namespace.

    Args:
        name: Module name, typically ``__name__``; names outside the package (``__main__``) are nested under it.

    Returns:
        The logger ``cpn_spectra.<module>``.
    """
    if name == PACKAGE_LOGGER or name.startswith(f"{PACKAGE_LOGGER}."):
        return logging.getLogger(name)
    return logging.getLogger(f"{PACKAGE_LOGGER}.{name}")
