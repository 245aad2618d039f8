"""Input validation utilities."""

from __future__ import annotations

from typing import Any

import typer
from rich.console import Console

from ..logging_config import get_logger

logger = get_logger(__name__)
console = Console(stderr=True)

# Same code typer uses for malformed arguments
USAGE_EXIT_CODE = 2


def validate_choice(
    value: str,
    choices: list[str],
    parameter_name: str,
    case_sensitive: bool = False,
) -> str:
    """Validate that a value is one of the allowed choices.

    Args:
        value: User input value
        choices: List of valid choices
        parameter_name: Name of the parameter for error messages
        case_sensitive: Whether to perform case-sensitive comparison

    Returns:
        The validated value (lowercased unless case_sensitive)

    Raises:
        typer.Exit: With the usage exit code if validation fails
    """
    test_value = value if case_sensitive else value.lower()
    test_choices = choices if case_sensitive else [c.lower() for c in choices]

    if test_value not in test_choices:
        console.print(
            f"[bold red]Error:[/bold red] Invalid {parameter_name} '{value}'. Must be one of: {', '.join(choices)}"
        )
        raise typer.Exit(code=USAGE_EXIT_CODE)

    return test_value


def validate_conflict(
    param1_name: str,
    param1_value: Any,
    param2_name: str,
    param2_value: Any,
    message: str | None = None,
) -> None:
    """Validate that two parameters are not both set.

    Raises:
        typer.Exit: With the usage exit code if both parameters are set
    """
    if param1_value is not None and param2_value is not None:
        error_msg = message or f"Cannot use both {param1_name} and {param2_name} at the same time."
        console.print(f"[bold red]Error:[/bold red] {error_msg}")
        raise typer.Exit(code=USAGE_EXIT_CODE)


def validate_one_of(param1_name: str, param1_value: Any, param2_name: str, param2_value: Any) -> None:
    """Validate that exactly one of two alternative parameters is set."""
    validate_conflict(param1_name, param1_value, param2_name, param2_value)
    if param1_value is None and param2_value is None:
        console.print(f"[bold red]Error:[/bold red] One of {param1_name} or {param2_name} is required.")
        raise typer.Exit(code=USAGE_EXIT_CODE)
