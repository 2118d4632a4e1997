"""Figure reproductions from sweep CSVs; consumes files, never the simulator."""

__version__ = "0.1.0"

from .render import FigureSpec, SUPPORTED_FIGURES, render
from .schemas import MissingInput, SchemaMismatch, read_table

__all__ = [
    "FigureSpec",
    "MissingInput",
    "SUPPORTED_FIGURES",
    "SchemaMismatch",
    "read_table",
    "render",
]
