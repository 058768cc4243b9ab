"""Standalone BLER curve renderer for scheduler-comparison CSVs."""

from .plotviz import DEFAULT_STYLES, PlotSpec, SchemaError, read_results, render

__version__ = "0.1.0"
