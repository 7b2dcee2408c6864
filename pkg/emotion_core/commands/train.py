"""``train`` - fit MF or EMF on the training split and save the model file."""
import argparse

from emotion_core.config import Settings
from emotion_core.dependencies import (
    dataset_parser,
    finish_run,
    load_split,
    output_dir,
    thresholds,
    thresholds_parser,
    train_config,
    training_parser,
)
from emotion_core.logging_config import get_logger
from emotion_core.models.enums import Algorithm
from emotion_core.services.factorization import save_model, train_emf, train_mf
from emotion_core.services.item_stats import classify, compute_item_stats

logger = get_logger("commands.train")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "train",
        parents=[*parents, dataset_parser(), thresholds_parser(), training_parser()],
        help="Train a factorization model on the training split",
    )
    parser.add_argument("--algo", choices=[Algorithm.MF.value, Algorithm.EMF.value], default=Algorithm.EMF.value)
    parser.add_argument("--model-name", default="model.emf", help="File name inside --out-dir")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    out_dir = output_dir(args, settings)
    config = train_config(args, settings)
    data, train, _ = load_split(args, settings)

    if Algorithm(args.algo) == Algorithm.MF:
        model = train_mf(train, config)
    else:
        stats = classify(compute_item_stats(train), thresholds(args, settings))
        model = train_emf(train, stats, config)

    path = save_model(model, out_dir / args.model_name)
    finish_run("train", args, settings, out_dir, data.inputs, [path])
    if model.loss_history:
        logger.info(f"Final training loss: {model.loss_history[-1]:.6f}")
    return 0
