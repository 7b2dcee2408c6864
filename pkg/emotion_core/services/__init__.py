"""Services package."""
from emotion_core.services.ingest import parse_csv_ratings, parse_movielens, parse_triples, split
from emotion_core.services.item_stats import classify, compute_item_stats
from emotion_core.services.emotion_score import build_emotion_matrix, emotional_score, rank_emotional_items
from emotion_core.services.factorization import load_model, predict, save_model, train_emf, train_mf
from emotion_core.services.evaluation import degree_of_matthew_effect, mae, run_comparison
from emotion_core.services.heatmap_render import emit_comparison_plot_data, render_heatmap

__all__ = [
    "parse_csv_ratings",
    "parse_movielens",
    "parse_triples",
    "split",
    "classify",
    "compute_item_stats",
    "build_emotion_matrix",
    "emotional_score",
    "rank_emotional_items",
    "load_model",
    "predict",
    "save_model",
    "train_emf",
    "train_mf",
    "degree_of_matthew_effect",
    "mae",
    "run_comparison",
    "emit_comparison_plot_data",
    "render_heatmap",
]
