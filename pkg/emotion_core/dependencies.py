"""Command dependencies - shared flags, settings resolution and dataset loading."""
import argparse
from pathlib import Path
from typing import Any, NamedTuple, Optional

from emotion_core.config import Settings
from emotion_core.exceptions import ArtifactIOError
from emotion_core.models.dataset import ColumnSpec, ItemCatalog, RatingDataset, SplitSpec
from emotion_core.models.enums import DatasetFormat
from emotion_core.models.factor import TrainConfig
from emotion_core.models.stats import PopularityThresholds
from emotion_core.services import ingest
from emotion_core.services.manifest import build_manifest, derive_seed, write_manifest


class LoadedData(NamedTuple):
    dataset: RatingDataset
    catalog: ItemCatalog
    inputs: list[Path]


# ==================== Parent parsers ====================

def common_parser() -> argparse.ArgumentParser:
    """Flags every subcommand accepts. Defaults stay None so settings can fill them."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="key=value config file layered over the environment")
    parser.add_argument("--seed", type=int, help="Master seed for every random component")
    parser.add_argument("--out-dir", help="Directory for outputs and manifest.json")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return parser


def dataset_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("dataset")
    group.add_argument(
        "--format", choices=[f.value for f in DatasetFormat], default=DatasetFormat.MOVIELENS.value,
        help="movielens (.dat), csv (header row) or triples (canonical export)",
    )
    group.add_argument("--ratings", required=True, help="Rating log to read")
    group.add_argument("--movies", help="MovieLens movies.dat for titles and genres")
    group.add_argument("--catalog", help="Exported catalog CSV (item_id,title,year,genres)")
    group.add_argument("--user-col", default="user_id")
    group.add_argument("--item-col", default="item_id")
    group.add_argument("--rating-col", default="rating")
    group.add_argument("--delimiter", default=",")
    group.add_argument("--max-rating", type=float, help="Rating scale maximum for csv/triples input")
    group.add_argument("--test-fraction", type=float, help="Share of triples held out for testing")
    return parser


def thresholds_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--score-quantile", type=float, help="Quantile of item mean rating for 'large score'")
    parser.add_argument("--count-quantile", type=float, help="Quantile of item rating count for 'large count'")
    return parser


def training_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("training")
    group.add_argument("--lambda", dest="emotion_weight", type=float, help="Emotion regularization weight")
    group.add_argument("--dim", type=int, help="Latent dimension")
    group.add_argument("--lr", dest="learning_rate", type=float, help="SGD step size")
    group.add_argument("--epochs", type=int)
    group.add_argument("--init-scale", type=float)
    return parser


# ==================== Resolution ====================

def pick(args: argparse.Namespace, name: str, settings: Settings, field: Optional[str] = None) -> Any:
    """Flag value when given, otherwise the settings value."""
    value = getattr(args, name, None)
    return value if value is not None else getattr(settings, field or name)


def master_seed(args: argparse.Namespace, settings: Settings) -> int:
    return pick(args, "seed", settings)


def output_dir(args: argparse.Namespace, settings: Settings) -> Path:
    path = Path(pick(args, "out_dir", settings, "output_dir"))
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ArtifactIOError(f"Cannot create output directory {path}: {e.strerror or e}") from e
    return path


def thresholds(args: argparse.Namespace, settings: Settings) -> PopularityThresholds:
    return PopularityThresholds(
        score_quantile=pick(args, "score_quantile", settings),
        count_quantile=pick(args, "count_quantile", settings),
    )


def split_spec(args: argparse.Namespace, settings: Settings) -> SplitSpec:
    return SplitSpec(
        test_fraction=pick(args, "test_fraction", settings),
        seed=derive_seed(master_seed(args, settings), "split"),
    )


def train_config(args: argparse.Namespace, settings: Settings) -> TrainConfig:
    return TrainConfig(
        d=pick(args, "dim", settings),
        learning_rate=pick(args, "learning_rate", settings),
        emotion_weight=pick(args, "emotion_weight", settings),
        epochs=pick(args, "epochs", settings),
        seed=master_seed(args, settings),
        init_scale=pick(args, "init_scale", settings),
        cosine_floor=settings.cosine_floor,
        norm_floor=settings.norm_floor,
    )


# ==================== Data ====================

def load_dataset(args: argparse.Namespace, settings: Settings) -> LoadedData:
    """Parse the rating log named by the dataset flags, plus its optional catalog."""
    fmt = DatasetFormat(args.format)
    ratings_path = Path(args.ratings)
    inputs = [ratings_path]
    max_rating = pick(args, "max_rating", settings)

    if fmt == DatasetFormat.MOVIELENS:
        movies_path = Path(args.movies) if args.movies else None
        dataset, catalog = ingest.parse_movielens(ratings_path, movies_path)
        if movies_path:
            inputs.append(movies_path)
    elif fmt == DatasetFormat.CSV:
        dataset = ingest.parse_csv_ratings(
            ratings_path,
            ColumnSpec(
                user_col=args.user_col,
                item_col=args.item_col,
                rating_col=args.rating_col,
                max_rating=max_rating,
                delimiter=args.delimiter,
            ),
        )
        catalog = ItemCatalog()
    else:
        dataset = ingest.parse_triples(ratings_path, max_rating)
        catalog = ItemCatalog()

    if args.catalog:
        catalog_path = Path(args.catalog)
        catalog = ingest.load_catalog(catalog_path, dataset)
        inputs.append(catalog_path)

    return LoadedData(dataset=dataset, catalog=catalog, inputs=inputs)


def load_split(args: argparse.Namespace, settings: Settings) -> tuple[LoadedData, RatingDataset, RatingDataset]:
    data = load_dataset(args, settings)
    train, test = ingest.split(data.dataset, split_spec(args, settings))
    return data, train, test


def finish_run(
    subcommand: str,
    args: argparse.Namespace,
    settings: Settings,
    out_dir: Path,
    inputs: list[Path],
    outputs: list[Path],
) -> Path:
    """Write the run manifest next to the outputs."""
    flags = {k: v for k, v in vars(args).items() if k not in ("handler", "command")}
    manifest = build_manifest(subcommand, flags, master_seed(args, settings), inputs, outputs)
    return write_manifest(manifest, out_dir)
