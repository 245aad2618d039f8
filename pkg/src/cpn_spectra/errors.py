"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations

from functools import partial
from typing import Any


class CpnSpectraError(Exception):
    """Base class for every error raised by cpn_spectra.

    Attributes:
        exit_code: Process exit code the CLI uses when this error escapes a command.
    """

    exit_code: int = 1


class UsageError(CpnSpectraError, ValueError):
    """A precondition of an operation was violated by its caller."""

    exit_code = 2


class ResourceError(CpnSpectraError):
    """A query needs an ambient space larger than the configured column cap."""

    exit_code = 3

    def __init__(self, message: str, *, requested: int, limit: int) -> None:
        super().__init__(message)
        self.requested = requested
        self.limit = limit

    def __reduce__(self) -> tuple[Any, ...]:
        # keyword-only fields are not in args
        return partial(type(self), requested=self.requested, limit=self.limit), self.args


class VerificationError(CpnSpectraError):
    """Two independent computations of the same quantity disagree.

    Attributes:
        expected: Value produced by the reference route.
        computed: Value produced by the route under test.
        witness: Data needed to reproduce the disagreement.
    """

    exit_code = 1

    def __init__(self, message: str, *, expected: Any = None, computed: Any = None, witness: Any = None) -> None:
        super().__init__(message)
        self.expected = expected
        self.computed = computed
        self.witness = witness

    def __reduce__(self) -> tuple[Any, ...]:
        fields = {"expected": self.expected, "computed": self.computed, "witness": self.witness}
        return partial(type(self), **fields), self.args
