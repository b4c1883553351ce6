"""Command line entry points: plot-sweep and plot-trajectory."""

from __future__ import annotations

import argparse
import sys

from .figspec import FigureSpec, SeriesSpec, SpecError, load_figure_spec
from .render import render_sweep_figure, render_trajectory_figure


def _parser(description: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--csv", required=True, help="input CSV path")
    parser.add_argument("--spec", default=None, help="figure spec JSON path")
    parser.add_argument("--out", default=".", help="output directory")
    return parser


def main_sweep(argv=None) -> int:
    args = _parser("Render a sweep CSV into SVG+PNG").parse_args(argv)
    try:
        if args.spec:
            spec = load_figure_spec(args.spec)
        else:
            spec = FigureSpec(
                x_column="param_value",
                series=tuple(SeriesSpec(**s) for s in
                             ({"column": "bound_definitional", "style": "dashed_line",
                               "color": "tab:red"},
                              {"column": "t_controlled", "style": "markers",
                               "color": "tab:blue", "marker": "o"},
                              {"column": "t_uncontrolled", "style": "markers",
                               "color": "tab:green", "marker": "s"})),
                x_scale="log", y_scale="log", output_basename="sweep")
        result = render_sweep_figure(args.csv, spec, args.out)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(result.svg_path)
    print(result.png_path)
    return 0


def main_trajectory(argv=None) -> int:
    args = _parser("Render a trajectory CSV into SVG+PNG").parse_args(argv)
    try:
        spec = load_figure_spec(args.spec) if args.spec else None
        result = render_trajectory_figure(args.csv, spec, args.out)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(result.svg_path)
    print(result.png_path)
    return 0
