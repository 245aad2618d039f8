"""Shared fixtures."""

from __future__ import annotations

from collections.abc import Iterator

import pytest

from cpn_spectra.config import RuntimeConfig, configured


@pytest.fixture
def euler_checked() -> Iterator[RuntimeConfig]:
    """Run a test with the full Euler operator cross-check switched on."""
    with configured(check_euler=True) as config:
        yield config
