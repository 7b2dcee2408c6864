"""``emotion`` - Emotional Scores, item statistics and the most-emotional-item ranking."""
import argparse

import pandas as pd

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
from emotion_core.exceptions import ConfigError
from emotion_core.logging_config import get_logger
from emotion_core.models.enums import ESSource
from emotion_core.services.emotion_score import (
    build_emotion_matrix,
    export_emotion_scores,
    export_ranking,
    export_user_emotion,
    genre_breakdown,
    rank_emotional_items,
    total_emotional_score,
    user_emotion_profile,
)
from emotion_core.services.ingest import write_frame
from emotion_core.services.item_stats import classify, compute_item_stats, export_item_stats

logger = get_logger("commands.emotion")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "emotion",
        parents=[*parents, dataset_parser(), thresholds_parser()],
        help="Compute Emotional Scores over the whole dataset and rank items",
    )
    parser.add_argument("--top", type=int, help="Number of items in the ranking")
    parser.add_argument(
        "--source", choices=[s.value for s in ESSource], default=ESSource.NORMALIZED.value,
        help="Rank by normalized (default) or raw Emotional Score",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    top = pick(args, "top", settings, "ranking_size")
    if top <= 0:
        raise ConfigError(f"--top must be positive, got {top}")
    out_dir = output_dir(args, settings)
    data = load_dataset(args, settings)

    stats = classify(compute_item_stats(data.dataset), thresholds(args, settings))
    matrix = build_emotion_matrix(data.dataset, stats)
    ranking = rank_emotional_items(matrix, data.catalog, top, ESSource(args.source))
    genres = genre_breakdown(ranking)

    outputs = [
        export_item_stats(stats, data.dataset.item_ids, out_dir / "item_stats.csv"),
        export_emotion_scores(matrix, out_dir / "emotion_scores.csv"),
        export_ranking(ranking, out_dir / "ranking.csv"),
        export_user_emotion(user_emotion_profile(matrix), out_dir / "user_emotion.csv"),
    ]
    if genres:
        frame = pd.DataFrame({"genre": list(genres), "items": list(genres.values())})
        outputs.append(write_frame(frame, out_dir / "ranking_genres.csv"))

    finish_run("emotion", args, settings, out_dir, data.inputs, outputs)
    logger.info(f"Total raw Emotional Score: {total_emotional_score(matrix):.6g}")
    for rank, item in enumerate(ranking.items, start=1):
        logger.info(f"{rank:>3}. {item.title or f'item {item.item_id}'}  mean ES {item.mean_es:.4f}")
    return 0
