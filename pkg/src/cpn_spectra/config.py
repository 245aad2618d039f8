"""Runtime configuration knobs."""

from __future__ import annotations

from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, replace

from .errors import UsageError
from .logging_config import get_logger

logger = get_logger(__name__)

DEFAULT_MAX_COLUMNS = 20000


@dataclass(frozen=True)
class RuntimeConfig:
    """Settings that change how much work is allowed, never what is computed.

    Attributes:
        max_columns: Largest ambient dimension a space constructor may enumerate.
        workers: Process count for piece evaluation and oracle checks (1 runs inline).
        check_euler: Recompute the full Euler operator inside euler_radial and compare.
    """

    max_columns: int = DEFAULT_MAX_COLUMNS
    workers: int = 1
    check_euler: bool = False

    def __post_init__(self) -> None:
        if self.max_columns < 1:
            raise UsageError(f"max_columns must be positive, got {self.max_columns}")
        if self.workers < 1:
            raise UsageError(f"workers must be positive, got {self.workers}")


_active: ContextVar[RuntimeConfig] = ContextVar("cpn_spectra_config", default=RuntimeConfig())


def get_config() -> RuntimeConfig:
    """Return the configuration active in the current context."""
    return _active.get()


@contextmanager
def configured(**overrides: int | bool) -> Iterator[RuntimeConfig]:
    """Install an updated configuration for the duration of a block.

    Args:
        **overrides: Field values replacing those of the active configuration.

    Yields:
        The configuration in force inside the block.
    """
    config = replace(get_config(), **overrides)  # type: ignore[arg-type]
    token = _active.set(config)
    logger.debug(f"Runtime configuration: {config}")
    try:
        yield config
    finally:
        _active.reset(token)
