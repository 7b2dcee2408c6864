"""Heatmap rendering - ES matrix rasters (binary PPM) and comparison charts (SVG)."""
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from emotion_core.exceptions import ArtifactIOError, ConfigError
from emotion_core.logging_config import get_logger
from emotion_core.models.emotion import EmotionMatrix
from emotion_core.models.enums import PoolingMode
from emotion_core.models.raster import GRAYSCALE, VIRIDIS, Colormap, RasterSpec
from emotion_core.models.report import EvalReport
from emotion_core.services.evaluation import write_comparison_csv

logger = get_logger("heatmap_render")

COLORMAPS = {cmap.name: cmap for cmap in (VIRIDIS, GRAYSCALE)}

# Observed cells land here when separated from the missing-value floor
OBSERVED_FLOOR = 0.05

# Fixed salt keeps SVG element ids identical between runs
SVG_RC = {"svg.hashsalt": "emotion-core", "svg.fonttype": "none"}
BAR_COLORS = {"mae": "#3b528b", "dme": "#5ec962"}


def get_colormap(name: str) -> Colormap:
    try:
        return COLORMAPS[name]
    except KeyError:
        raise ConfigError(f"Unknown colormap {name!r}; choose from {sorted(COLORMAPS)}")


def apply_colormap(values: np.ndarray, colormap: Colormap) -> np.ndarray:
    """Map values in [0, 1] to uint8 RGB; 0 and 1 hit the first and last control points."""
    points = np.asarray(colormap.control_points, dtype=np.float64)
    anchors = np.linspace(0.0, 1.0, len(points))
    clipped = np.clip(values, 0.0, 1.0)
    channels = [np.interp(clipped, anchors, points[:, c]) for c in range(3)]
    return np.rint(np.stack(channels, axis=-1)).astype(np.uint8)


def _bucket_edges(n: int, buckets: int) -> np.ndarray:
    return (np.arange(buckets + 1, dtype=np.int64) * n) // buckets


def pool(values: np.ndarray, out_height: int, out_width: int, mode: PoolingMode) -> np.ndarray:
    """Downsample to at most (out_height, out_width) contiguous blocks."""
    n_rows, n_cols = values.shape
    out_height, out_width = min(out_height, n_rows), min(out_width, n_cols)
    if (out_height, out_width) == (n_rows, n_cols):
        return values

    rows = _bucket_edges(n_rows, out_height)
    cols = _bucket_edges(n_cols, out_width)
    if mode == PoolingMode.MAX:
        pooled = np.maximum.reduceat(values, rows[:-1], axis=0)
        return np.maximum.reduceat(pooled, cols[:-1], axis=1)

    sums = np.add.reduceat(np.add.reduceat(values, rows[:-1], axis=0), cols[:-1], axis=1)
    return sums / np.outer(np.diff(rows), np.diff(cols))


def write_ppm(rgb: np.ndarray, out_path: Path) -> Path:
    """Binary P6 pixmap, maxval 255."""
    height, width, _ = rgb.shape
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    path = Path(out_path)
    try:
        path.write_bytes(header + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())
    except OSError as e:
        raise ArtifactIOError(f"Cannot write image {path}: {e.strerror or e}") from e
    return path


def heatmap_values(matrix: EmotionMatrix, spec: RasterSpec) -> np.ndarray:
    """Normalized ES in display order, with the optional observed-cell remap."""
    values = matrix.normalized
    if spec.separate_observed:
        values = values.copy()
        mask = matrix.observed_mask()
        values[mask] = OBSERVED_FLOOR + (1.0 - OBSERVED_FLOOR) * values[mask]
    if spec.sort_by_count:
        n_users, n_items = matrix.shape
        user_order = np.argsort(-np.bincount(matrix.user_indices, minlength=n_users), kind="stable")
        item_order = np.argsort(-np.bincount(matrix.item_indices, minlength=n_items), kind="stable")
        values = values[np.ix_(user_order, item_order)]
    return values


def render_heatmap(matrix: EmotionMatrix, spec: RasterSpec, out_path: Path) -> Path:
    """Render users as rows and items as columns through the colormap into a P6 file."""
    n_users, n_items = matrix.shape
    if n_users == 0 or n_items == 0:
        raise ConfigError("Cannot render an empty ES matrix")

    pooled = pool(heatmap_values(matrix, spec), spec.max_height, spec.max_width, spec.pooling)
    path = write_ppm(apply_colormap(pooled, spec.colormap), out_path)
    logger.info(
        f"Heatmap {n_users}x{n_items} -> {pooled.shape[1]}x{pooled.shape[0]} px "
        f"({spec.pooling.value} pooling, {spec.colormap.name}): {path}"
    )
    return path


def emit_comparison_plot_data(reports: list[EvalReport], svg_path: Path, csv_path: Path) -> tuple[Path, Path]:
    """Bar chart with one MAE and one DME panel, one labeled bar per report, plus its CSV."""
    if not reports:
        raise ConfigError("No reports to plot")

    labels = [r.label for r in reports]
    positions = np.arange(len(reports))
    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(4.0 + 1.2 * len(reports), 4.0))
        for ax, metric, title in zip(fig.subplots(1, 2), ("mae", "dme"), ("MAE", "Degree of Matthew Effect")):
            values = [getattr(r, metric) for r in reports]
            bars = ax.bar(positions, values, color=BAR_COLORS[metric])
            for idx, (bar, value) in enumerate(zip(bars, values)):
                bar.set_gid(f"bar-{metric}-{idx}")
                ax.annotate(
                    f"{value:.3f}",
                    xy=(bar.get_x() + bar.get_width() / 2, value),
                    ha="center", va="bottom", fontsize=8,
                )
            ax.set_xticks(positions, labels, rotation=30, ha="right")
            ax.set_title(title)
            ax.margins(y=0.15)
        fig.tight_layout()

        svg_path = Path(svg_path)
        try:
            svg_path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(svg_path, format="svg", metadata={"Date": None})
        except OSError as e:
            raise ArtifactIOError(f"Cannot write chart {svg_path}: {e.strerror or e}") from e

    csv_path = write_comparison_csv(reports, csv_path)
    logger.info(f"Comparison chart: {svg_path} ({len(reports)} bars per panel)")
    return svg_path, csv_path
