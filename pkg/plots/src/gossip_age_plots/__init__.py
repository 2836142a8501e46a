"""Charts for gossip-age-sim CSV output."""

from .csvio import CSV_VERSION_HEADER, PlotDataError, read_spread, read_sweep
from .render import ChartKind, PlotSpec, build_figure, render

__all__ = [
    "CSV_VERSION_HEADER",
    "PlotDataError",
    "read_spread",
    "read_sweep",
    "ChartKind",
    "PlotSpec",
    "build_figure",
    "render",
]
