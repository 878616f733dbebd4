"""Offline figure generation from vortexcap CSV outputs."""

from .branch import fitted_intercept, plot_branch
from .common import FigureSpec, SchemaError, Table, read_table
from .contour import interface_curves, plot_contour_sphere
from .region import boundary_curves, plot_region

__version__ = "0.1.0"
