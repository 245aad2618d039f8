"""CPn Spectra."""

from __future__ import annotations

__author__ = "cpn_spectra contributors"
__credits__ = ["cpn_spectra contributors"]
__maintainer__ = "cpn_spectra contributors"
__version__ = "0.1.0"
__application_title__ = "CPn Spectra"
__application_binary__ = "cpn_spectra"
__licence__ = "MIT"
