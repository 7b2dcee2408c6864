"""``plot`` - redraw the comparison chart from a comparison CSV."""
import argparse
from pathlib import Path

from emotion_core.config import Settings
from emotion_core.dependencies import finish_run, output_dir
from emotion_core.services.evaluation import read_comparison_csv
from emotion_core.services.heatmap_render import emit_comparison_plot_data


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("plot", parents=parents, help="SVG bar chart from comparison.csv")
    parser.add_argument("--report", required=True, help="comparison.csv written by 'compare' or 'evaluate'")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    out_dir = output_dir(args, settings)
    report_path = Path(args.report)
    reports = read_comparison_csv(report_path)
    outputs = emit_comparison_plot_data(reports, out_dir / "comparison.svg", out_dir / "comparison_plot.csv")
    finish_run("plot", args, settings, out_dir, [report_path], list(outputs))
    return 0
