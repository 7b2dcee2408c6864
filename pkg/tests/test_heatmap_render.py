import numpy as np
import pytest

from emotion_core.exceptions import ConfigError
from emotion_core.models.enums import PoolingMode
from emotion_core.models.raster import GRAYSCALE, VIRIDIS, RasterSpec
from emotion_core.models.report import EvalReport
from emotion_core.models.stats import PopularityThresholds
from emotion_core.services.emotion_score import build_emotion_matrix
from emotion_core.services.heatmap_render import (
    apply_colormap,
    emit_comparison_plot_data,
    get_colormap,
    heatmap_values,
    pool,
    render_heatmap,
)
from emotion_core.services.item_stats import classify, compute_item_stats


def _read_ppm(path):
    data = path.read_bytes()
    magic, dims, maxval, pixels = data.split(b"\n", 3)
    width, height = (int(x) for x in dims.split())
    assert magic == b"P6" and maxval == b"255"
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 3)


def _matrix(dataset):
    return build_emotion_matrix(dataset, classify(compute_item_stats(dataset), PopularityThresholds()))


def test_colormap_endpoints_hit_control_points():
    rgb = apply_colormap(np.array([0.0, 1.0]), VIRIDIS)
    assert tuple(rgb[0]) == VIRIDIS.control_points[0]
    assert tuple(rgb[1]) == VIRIDIS.control_points[-1]


def test_grayscale_is_linear():
    rgb = apply_colormap(np.array([0.0, 0.5, 1.0]), GRAYSCALE)
    assert rgb[:, 0].tolist() == [0, 128, 255]
    assert (rgb[:, 0] == rgb[:, 1]).all() and (rgb[:, 1] == rgb[:, 2]).all()


def test_unknown_colormap():
    assert get_colormap("viridis") is VIRIDIS
    with pytest.raises(ConfigError):
        get_colormap("jet")


def test_mean_and_max_pooling():
    values = np.arange(16, dtype=float).reshape(4, 4)

    np.testing.assert_allclose(pool(values, 2, 2, PoolingMode.MEAN), [[2.5, 4.5], [10.5, 12.5]])
    np.testing.assert_allclose(pool(values, 2, 2, PoolingMode.MAX), [[5, 7], [13, 15]])


def test_pooling_with_uneven_blocks():
    values = np.arange(5, dtype=float).reshape(5, 1)
    # row edges (0, 2, 5)
    np.testing.assert_allclose(pool(values, 2, 1, PoolingMode.MEAN), [[0.5], [3.0]])


def test_small_matrices_are_not_pooled():
    values = np.random.default_rng(0).random((3, 5))
    assert pool(values, 10, 10, PoolingMode.MEAN) is values


def test_render_writes_bounded_ppm(tmp_path, synthetic_dataset):
    matrix = _matrix(synthetic_dataset)
    path = render_heatmap(matrix, RasterSpec(max_width=7, max_height=4), tmp_path / "heatmap.ppm")

    pixels = _read_ppm(path)
    assert pixels.shape == (4, 7, 3)


def test_render_without_pooling_maps_cells_exactly(tmp_path, tiny_dataset):
    matrix = _matrix(tiny_dataset)
    path = render_heatmap(matrix, RasterSpec(colormap=GRAYSCALE), tmp_path / "heatmap.ppm")

    pixels = _read_ppm(path)
    assert pixels.shape == (3, 3, 3)
    expected = np.rint(matrix.normalized * 255).astype(np.uint8)
    np.testing.assert_array_equal(pixels[:, :, 0], expected)


def test_render_is_deterministic(tmp_path, synthetic_dataset):
    matrix = _matrix(synthetic_dataset)
    spec = RasterSpec(max_width=5, max_height=5, pooling=PoolingMode.MAX)
    first = render_heatmap(matrix, spec, tmp_path / "a.ppm").read_bytes()
    second = render_heatmap(matrix, spec, tmp_path / "b.ppm").read_bytes()
    assert first == second


def test_separate_observed_lifts_observed_cells(tiny_dataset):
    matrix = _matrix(tiny_dataset)
    values = heatmap_values(matrix, RasterSpec(separate_observed=True))

    mask = matrix.observed_mask()
    assert (values[mask] >= 0.05).all()
    assert (values[~mask] == 0.0).all()


def test_sort_by_count_puts_busiest_rows_first(tiny_dataset):
    matrix = _matrix(tiny_dataset)
    values = heatmap_values(matrix, RasterSpec(sort_by_count=True))
    # user 30 rated three items, item 100 was rated three times
    np.testing.assert_array_equal(values[0], matrix.normalized[2][[0, 1, 2]])
    assert values.shape == matrix.shape


def _reports():
    return [
        EvalReport(algorithm="mf", mae=0.812, dme=1.25, top_k=10, seed=42, dataset_id="ml"),
        EvalReport(algorithm="emf", mae=0.79, dme=1.1, top_k=10, seed=42, dataset_id="ml", emotion_weight=0.01),
        EvalReport(algorithm="random", mae=1.5, dme=0.2, top_k=10, seed=42, dataset_id="ml"),
    ]


def test_comparison_chart(tmp_path):
    svg_path, csv_path = emit_comparison_plot_data(_reports(), tmp_path / "chart.svg", tmp_path / "chart.csv")

    svg = svg_path.read_text(encoding="utf-8")
    for gid in ("bar-mae-0", "bar-mae-2", "bar-dme-1"):
        assert f'id="{gid}"' in svg
    for label in ("0.812", "0.790", "1.100", "0.200"):
        assert label in svg
    assert len(csv_path.read_text(encoding="utf-8").splitlines()) == 4


def test_comparison_chart_is_byte_stable(tmp_path):
    first = emit_comparison_plot_data(_reports(), tmp_path / "a.svg", tmp_path / "a.csv")[0].read_bytes()
    second = emit_comparison_plot_data(_reports(), tmp_path / "b.svg", tmp_path / "b.csv")[0].read_bytes()
    assert first == second


def test_comparison_chart_needs_reports(tmp_path):
    with pytest.raises(ConfigError):
        emit_comparison_plot_data([], tmp_path / "chart.svg", tmp_path / "chart.csv")


def test_mean_pooling_conserves_block_means():
    values = np.random.default_rng(12).random((37, 53))
    pooled = pool(values, 5, 7, PoolingMode.MEAN)

    rows = (np.arange(6) * 37) // 5
    cols = (np.arange(8) * 53) // 7
    for r in range(5):
        for c in range(7):
            block = values[rows[r]:rows[r + 1], cols[c]:cols[c + 1]]
            assert abs(pooled[r, c] - block.mean()) <= 1e-9

    weights = np.outer(np.diff(rows), np.diff(cols))
    assert abs((pooled * weights).sum() / weights.sum() - values.mean()) <= 1e-9


def test_even_mean_pooling_keeps_the_overall_mean():
    values = np.random.default_rng(13).random((12, 18))
    assert abs(pool(values, 4, 6, PoolingMode.MEAN).mean() - values.mean()) <= 1e-9
