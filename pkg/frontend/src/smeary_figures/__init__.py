"""Figure rendering for smeary simulation output.

This package consumes the CSV files written by the smeary command line
tool and draws the corresponding log-log convergence figures.  It shares
no code with the simulation package; the CSV schema is the only contract
between the two.
"""

from .loader import HEADER, RenderInputError, Row, load_rows
from .renderer import PlotSpec, RenderReport, build_figure, render

__all__ = [
    "HEADER",
    "PlotSpec",
    "RenderInputError",
    "RenderReport",
    "Row",
    "build_figure",
    "load_rows",
    "render",
]

__version__ = "0.1.0"
