"""Plot zollcut CLI artifacts.

This package touches files only: the density CSVs, their metadata sidecars,
and the JSON reports the simulator CLI writes.  It never imports the
simulator or recomputes anything physical; if a plot looks wrong, rerun the
producer, not this.
"""

from zollcut_viz.io import VizDataError, read_grid_csv, read_meta, read_report
from zollcut_viz.panels import PanelEntry, PanelSpec, load_panel_spec, render_panels
from zollcut_viz.convergence import render_convergence

__version__ = "0.1.0"

__all__ = [
    "PanelEntry",
    "PanelSpec",
    "VizDataError",
    "load_panel_spec",
    "read_grid_csv",
    "read_meta",
    "read_report",
    "render_convergence",
    "render_panels",
]
