"""``viz`` - render the Emotional Score heatmap of a dataset."""
import argparse

from emotion_core.config import Settings
from emotion_core.dependencies import (
    dataset_parser,
    finish_run,
    load_dataset,
    output_dir,
    pick,
    thresholds,
    thresholds_parser,
)
from emotion_core.logging_config import get_logger
from emotion_core.models.enums import PoolingMode
from emotion_core.models.raster import RasterSpec
from emotion_core.services.emotion_score import build_emotion_matrix
from emotion_core.services.heatmap_render import COLORMAPS, get_colormap, render_heatmap
from emotion_core.services.item_stats import classify, compute_item_stats

logger = get_logger("commands.viz")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "viz",
        parents=[*parents, dataset_parser(), thresholds_parser()],
        help="Render the ES matrix (users x items) as a PPM heatmap",
    )
    parser.add_argument("--pooling", choices=[p.value for p in PoolingMode])
    parser.add_argument("--max-size", type=int, help="Bound for both width and height")
    parser.add_argument("--max-width", type=int)
    parser.add_argument("--max-height", type=int)
    parser.add_argument("--colormap", choices=sorted(COLORMAPS))
    parser.add_argument("--separate-observed", action="store_true", help="Lift observed cells above missing ones")
    parser.add_argument("--sort-by-count", action="store_true", help="Most active users and items first")
    parser.add_argument("--image-name", default="heatmap.ppm", help="File name inside --out-dir")
    parser.set_defaults(handler=run)


def _first_set(*values):
    return next(value for value in values if value is not None)


def raster_spec(args: argparse.Namespace, settings: Settings) -> RasterSpec:
    return RasterSpec(
        max_width=_first_set(args.max_width, args.max_size, settings.max_width),
        max_height=_first_set(args.max_height, args.max_size, settings.max_height),
        colormap=get_colormap(pick(args, "colormap", settings)),
        pooling=PoolingMode(pick(args, "pooling", settings)),
        separate_observed=args.separate_observed,
        sort_by_count=args.sort_by_count,
    )


def run(args: argparse.Namespace, settings: Settings) -> int:
    spec = raster_spec(args, settings)
    out_dir = output_dir(args, settings)
    data = load_dataset(args, settings)

    stats = classify(compute_item_stats(data.dataset), thresholds(args, settings))
    matrix = build_emotion_matrix(data.dataset, stats)
    path = render_heatmap(matrix, spec, out_dir / args.image_name)

    finish_run("viz", args, settings, out_dir, data.inputs, [path])
    return 0
