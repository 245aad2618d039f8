"""Utility modules for cpn_spectra."""

from .path_utils import ensure_file_extension, prepare_output_path, write_output
from .validation_utils import USAGE_EXIT_CODE, validate_choice, validate_conflict, validate_one_of

__all__ = [
    "USAGE_EXIT_CODE",
    "ensure_file_extension",
    "prepare_output_path",
    "write_output",
    "validate_choice",
    "validate_conflict",
    "validate_one_of",
]
