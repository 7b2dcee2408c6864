"""``evaluate`` - score one saved model, or the random baseline, on the held-out split."""
import argparse

from emotion_core.config import Settings
from emotion_core.dependencies import dataset_parser, finish_run, load_split, master_seed, output_dir, pick
from emotion_core.exceptions import ConfigError, DataValidationError
from emotion_core.logging_config import get_logger
from emotion_core.models.enums import Algorithm, DMEUsers
from emotion_core.services.evaluation import ComparisonConfig, evaluate_predictor, write_comparison_csv, write_comparison_jsonl
from emotion_core.services.factorization import FactorPredictor, load_model, random_baseline
from emotion_core.services.manifest import derive_seed

logger = get_logger("commands.evaluate")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "evaluate",
        parents=[*parents, dataset_parser()],
        help="MAE and Degree of Matthew Effect of a saved model on the test split",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--model", help="Model file written by 'train'")
    source.add_argument("--random", action="store_true", help="Evaluate the random placement baseline")
    parser.add_argument("--top-k", type=int, help="Recommendation list length for DME")
    parser.add_argument("--dme-users", choices=[m.value for m in DMEUsers], help="Users contributing top-k lists")
    parser.add_argument("--dataset-id", help="Label written to the report (default: ratings file name)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    out_dir = output_dir(args, settings)
    data, train, test = load_split(args, settings)
    config = ComparisonConfig(
        top_k=pick(args, "top_k", settings),
        dme_users=DMEUsers(pick(args, "dme_users", settings)),
        dataset_id=args.dataset_id or data.inputs[0].name,
    )
    inputs = list(data.inputs)

    if args.random:
        seed = master_seed(args, settings)
        predictor = random_baseline(derive_seed(seed, "random-baseline"), train.max_rating)
        name, weight = Algorithm.RANDOM.value, None
        config = config.model_copy(update={"train": config.train.model_copy(update={"seed": seed})})
    else:
        model = load_model(args.model)
        if (model.n_users, model.n_items) != (train.n_users, train.n_items):
            raise DataValidationError(
                f"Model is {model.n_users}x{model.n_items} but the dataset has "
                f"{train.n_users} users and {train.n_items} items"
            )
        if model.max_rating != train.max_rating:
            raise ConfigError(f"Model max_rating {model.max_rating} differs from dataset {train.max_rating}")
        predictor = FactorPredictor(model)
        weight = model.config.emotion_weight or None
        name = Algorithm.EMF.value if weight else Algorithm.MF.value
        config = config.model_copy(update={"train": model.config})
        inputs.append(args.model)

    report = evaluate_predictor(name, predictor, train, test, config, weight)
    outputs = [
        write_comparison_csv([report], out_dir / "report.csv"),
        write_comparison_jsonl([report], out_dir / "report.jsonl"),
    ]
    finish_run("evaluate", args, settings, out_dir, inputs, outputs)
    return 0
