"""Publication-style SVG figures from chain-sweep CSV artifacts.

This package is a pure consumer: it reads the CSV tables emitted by the
`susyep` command line (spectrum, rigidity, splitting, fits schemas),
validates them, and renders deterministic SVG plots.  No physics is
recomputed here.
"""

from .figspec import FigureSpec, FigureSpecError
from .render import render
from .schema import CSV_SCHEMAS, SchemaError, read_table

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "FigureSpecError",
    "render",
    "CSV_SCHEMAS",
    "SchemaError",
    "read_table",
]
