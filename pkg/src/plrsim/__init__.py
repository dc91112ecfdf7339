"""Pupil light reflex simulation and iris pattern deformation."""

from . import photometry
from .errors import DomainError, MeasurementError, TraceFormatError

__version__ = "0.1.0"

__all__ = ["DomainError", "MeasurementError", "TraceFormatError", "photometry"]
