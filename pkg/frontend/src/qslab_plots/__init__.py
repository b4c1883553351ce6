"""Figure rendering for qslab sweep and trajectory CSV files."""

from .csvdata import CsvTable, read_csv
from .figspec import FigureSpec, SeriesSpec, SpecError, load_figure_spec
from .render import RenderResult, render_sweep_figure, render_trajectory_figure

__version__ = "0.1.0"
