"""``ingest`` - parse a rating log into the canonical triple store and split it."""
import argparse

from emotion_core.config import Settings
from emotion_core.dependencies import dataset_parser, finish_run, load_split, output_dir
from emotion_core.logging_config import get_logger
from emotion_core.services.ingest import export_catalog, export_triples

logger = get_logger("commands.ingest")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "ingest",
        parents=[*parents, dataset_parser()],
        help="Parse ratings into triples.csv plus train/test splits",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    out_dir = output_dir(args, settings)
    data, train, test = load_split(args, settings)

    outputs = [
        export_triples(data.dataset, out_dir / "triples.csv"),
        export_triples(train, out_dir / "train.csv"),
        export_triples(test, out_dir / "test.csv"),
    ]
    if len(data.catalog):
        outputs.append(export_catalog(data.catalog, out_dir / "catalog.csv"))

    finish_run("ingest", args, settings, out_dir, data.inputs, outputs)
    logger.info(
        f"Ingested {len(data.dataset)} triples "
        f"({data.dataset.n_users} users, {data.dataset.n_items} items) into {out_dir}"
    )
    return 0
