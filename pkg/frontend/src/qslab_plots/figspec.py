"""Figure specifications: which CSV columns to draw and how."""

from __future__ import annotations

import json
from dataclasses import dataclass


class SpecError(ValueError):
    """Invalid figure spec or CSV/spec mismatch."""


STYLES = ("dashed_line", "line", "markers")

# Default appearance for the sweep columns: dashed curve for bounds, markers
# for the measured times.
DEFAULT_SWEEP_SERIES = (
    {"column": "bound_definitional", "style": "dashed_line", "color": "tab:red"},
    {"column": "t_controlled", "style": "markers", "color": "tab:blue", "marker": "o"},
    {"column": "t_uncontrolled", "style": "markers", "color": "tab:green", "marker": "s"},
)


@dataclass(frozen=True)
class SeriesSpec:
    column: str
    style: str = "line"
    color: str | None = None
    marker: str = "o"
    label: str | None = None

    def __post_init__(self):
        if self.style not in STYLES:
            raise SpecError(f"unknown series style {self.style!r} (expected one of {STYLES})")


@dataclass(frozen=True)
class FigureSpec:
    x_column: str
    series: tuple[SeriesSpec, ...]
    csv: str | None = None
    x_scale: str = "linear"
    y_scale: str = "linear"
    x_label: str | None = None
    y_label: str | None = None
    title: str | None = None
    output_basename: str = "figure"

    def __post_init__(self):
        for name, scale in (("x_scale", self.x_scale), ("y_scale", self.y_scale)):
            if scale not in ("linear", "log"):
                raise SpecError(f"{name} must be 'linear' or 'log', got {scale!r}")
        if not self.series:
            raise SpecError("spec needs at least one series")

    def validate_columns(self, header: list[str]) -> None:
        missing = [self.x_column] + [s.column for s in self.series]
        missing = [c for c in missing if c not in header]
        if missing:
            raise SpecError(f"columns {missing} not found in CSV header {header}")


def load_figure_spec(path: str) -> FigureSpec:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec is not valid JSON: {exc}") from exc
    return figure_spec_from_dict(raw)


def figure_spec_from_dict(raw: dict) -> FigureSpec:
    if not isinstance(raw, dict) or "x_column" not in raw:
        raise SpecError("spec must be an object with an 'x_column' field")
    series_raw = raw.get("series", [dict(s) for s in DEFAULT_SWEEP_SERIES])
    try:
        series = tuple(SeriesSpec(**entry) for entry in series_raw)
    except TypeError as exc:
        raise SpecError(f"invalid series entry: {exc}") from exc
    known = {"csv", "x_column", "series", "x_scale", "y_scale", "x_label", "y_label",
             "title", "output_basename"}
    unknown = set(raw) - known
    if unknown:
        raise SpecError(f"unknown spec fields: {sorted(unknown)}")
    return FigureSpec(
        x_column=raw["x_column"], series=series, csv=raw.get("csv"),
        x_scale=raw.get("x_scale", "linear"), y_scale=raw.get("y_scale", "linear"),
        x_label=raw.get("x_label"), y_label=raw.get("y_label"),
        title=raw.get("title"), output_basename=raw.get("output_basename", "figure"))
