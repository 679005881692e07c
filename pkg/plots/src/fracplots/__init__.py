"""Post-hoc figure generation from fracsource CSV artifacts."""

from .render import FigureSpec, OverlayKind, render
from .schema import SchemaError, read_early_iterates, read_sweep_index, read_trace

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "OverlayKind",
    "render",
    "SchemaError",
    "read_trace",
    "read_early_iterates",
    "read_sweep_index",
]
