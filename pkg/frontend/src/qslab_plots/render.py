"""Render figure specs into SVG and PNG files.

Rendering is read-only over the CSVs and deterministic: a fixed SVG hash salt
and stripped date metadata make identical inputs produce identical SVG text.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .csvdata import CsvTable, read_csv  # noqa: E402
from .figspec import FigureSpec, SeriesSpec, SpecError  # noqa: E402

_DETERMINISTIC_RC = {
    "svg.hashsalt": "qslab-plots",
    "svg.fonttype": "none",
    "figure.dpi": 100,
    "savefig.dpi": 100,
}


@dataclass(frozen=True)
class RenderResult:
    svg_path: Path
    png_path: Path
    points_per_series: dict


def _finite_pairs(xs, ys):
    pairs = [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    return ([p[0] for p in pairs], [p[1] for p in pairs])


def _draw_series(ax, xs: list[float], ys: list[float], spec: SeriesSpec) -> int:
    label = spec.label or spec.column
    x, y = _finite_pairs(xs, ys)
    if spec.style == "dashed_line":
        ax.plot(x, y, linestyle="--", color=spec.color, label=label)
    elif spec.style == "line":
        ax.plot(x, y, linestyle="-", color=spec.color, label=label)
    else:
        ax.plot(x, y, linestyle="none", marker=spec.marker, color=spec.color, label=label)
    return len(x)


def _render(table: CsvTable, spec: FigureSpec, out_dir: str | Path) -> RenderResult:
    spec.validate_columns(table.header)
    xs = table.column(spec.x_column)
    counts = {}
    with plt.rc_context(_DETERMINISTIC_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        try:
            for series in spec.series:
                counts[series.column] = _draw_series(ax, xs, table.column(series.column),
                                                     series)
            if not any(counts.values()):
                raise SpecError("no finite data points in any series")
            ax.set_xscale(spec.x_scale)
            ax.set_yscale(spec.y_scale)
            ax.set_xlabel(spec.x_label or spec.x_column)
            if spec.y_label:
                ax.set_ylabel(spec.y_label)
            if spec.title:
                ax.set_title(spec.title)
            ax.legend()
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            svg_path = out / f"{spec.output_basename}.svg"
            png_path = out / f"{spec.output_basename}.png"
            fig.savefig(svg_path, format="svg", metadata={"Date": None})
            fig.savefig(png_path, format="png")
        finally:
            plt.close(fig)
    return RenderResult(svg_path=svg_path, png_path=png_path, points_per_series=counts)


def render_sweep_figure(csv_path: str, spec: FigureSpec, out_dir: str | Path) -> RenderResult:
    """Sweep figure: dashed bound curve plus marker series, per the spec."""
    return _render(read_csv(csv_path), spec, out_dir)


def render_trajectory_figure(csv_path: str, spec: FigureSpec | None, out_dir: str | Path,
                             output_basename: str = "trajectory") -> RenderResult:
    """Trajectory figure: every non-time column as a line over time by default."""
    table = read_csv(csv_path)
    if spec is None:
        series = tuple(SeriesSpec(column=c, style="line")
                       for c in table.header if c != "t")
        if not series:
            raise SpecError("trajectory CSV has no data columns")
        spec = FigureSpec(x_column="t", series=series, x_label="t",
                          output_basename=output_basename)
    return _render(table, spec, out_dir)
