"""``compare`` - train and evaluate several algorithms with one seed and chart the result."""
import argparse

from emotion_core.config import Settings
from emotion_core.dependencies import (
    dataset_parser,
    finish_run,
    load_split,
    output_dir,
    pick,
    thresholds,
    thresholds_parser,
    train_config,
    training_parser,
)
from emotion_core.exceptions import ComparisonError, ConfigError
from emotion_core.logging_config import get_logger
from emotion_core.models.enums import Algorithm, DMEUsers
from emotion_core.models.report import EvalReport
from emotion_core.services.evaluation import (
    ComparisonConfig,
    expand_algorithms,
    run_comparison,
    write_comparison_csv,
    write_comparison_jsonl,
)
from emotion_core.services.heatmap_render import emit_comparison_plot_data

logger = get_logger("commands.compare")


def parse_algorithms(value: str) -> list[Algorithm]:
    names = [part.strip().lower() for part in value.split(",") if part.strip()]
    if not names:
        raise ConfigError("--algos needs at least one algorithm")
    try:
        return [Algorithm(name) for name in names]
    except ValueError:
        raise ConfigError(f"Unknown algorithm in {value!r}; choose from {[a.value for a in Algorithm]}")


def parse_grid(value: str) -> list[float]:
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"--lambda-grid must be comma-separated numbers, got {value!r}")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "compare",
        parents=[*parents, dataset_parser(), thresholds_parser(), training_parser()],
        help="Compare MF, EMF and Random on MAE and Degree of Matthew Effect",
    )
    parser.add_argument("--algos", default="mf,emf,random", help="Comma-separated subset of mf,emf,random")
    parser.add_argument("--lambda-grid", help="Comma-separated EMF weights; one EMF row per value")
    parser.add_argument("--top-k", type=int, help="Recommendation list length for DME")
    parser.add_argument("--dme-users", choices=[m.value for m in DMEUsers], help="Users contributing top-k lists")
    parser.add_argument("--dataset-id", help="Label written to the report (default: ratings file name)")
    parser.set_defaults(handler=run)


def _write_reports(reports: list[EvalReport], out_dir) -> list:
    outputs = [
        write_comparison_csv(reports, out_dir / "comparison.csv"),
        write_comparison_jsonl(reports, out_dir / "comparison.jsonl"),
    ]
    if reports:
        outputs.extend(
            emit_comparison_plot_data(reports, out_dir / "comparison.svg", out_dir / "comparison_plot.csv")
        )
    return outputs


def run(args: argparse.Namespace, settings: Settings) -> int:
    algorithms = parse_algorithms(args.algos)
    grid = parse_grid(args.lambda_grid) if args.lambda_grid else None
    out_dir = output_dir(args, settings)
    data, train, test = load_split(args, settings)

    config = ComparisonConfig(
        train=train_config(args, settings),
        thresholds=thresholds(args, settings),
        top_k=pick(args, "top_k", settings),
        dme_users=DMEUsers(pick(args, "dme_users", settings)),
        dataset_id=args.dataset_id or data.inputs[0].name,
    )
    specs = expand_algorithms(algorithms, grid, config.train.emotion_weight)

    try:
        reports = run_comparison(train, test, specs, config)
    except ComparisonError as e:
        # Partial results are still written before the failure propagates
        outputs = _write_reports(e.reports, out_dir)
        finish_run("compare", args, settings, out_dir, data.inputs, outputs)
        raise

    outputs = _write_reports(reports, out_dir)
    finish_run("compare", args, settings, out_dir, data.inputs, outputs)
    return 0
