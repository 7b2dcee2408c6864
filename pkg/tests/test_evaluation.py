import math

import numpy as np
import pytest

from emotion_core.exceptions import ComparisonError, ConfigError, EvaluationError
from emotion_core.models.dataset import SplitSpec
from emotion_core.models.enums import Algorithm, DMEUsers
from emotion_core.models.factor import TrainConfig
from emotion_core.services.evaluation import (
    AlgorithmSpec,
    ComparisonConfig,
    degree_of_matthew_effect,
    expand_algorithms,
    exposure_counts,
    mae,
    matthew_effect_slope,
    read_comparison_csv,
    run_comparison,
    write_comparison_csv,
    write_comparison_jsonl,
)
from emotion_core.services.ingest import split
from tests.conftest import TablePredictor, low_rank_triples, make_dataset

FAST = TrainConfig(d=8, learning_rate=0.05, epochs=3, seed=11)


def test_mae_of_exact_and_offset_predictions(tiny_dataset):
    table = np.zeros((tiny_dataset.n_users, tiny_dataset.n_items))
    table[tiny_dataset.user_indices, tiny_dataset.item_indices] = tiny_dataset.ratings
    assert mae(TablePredictor(table), tiny_dataset) == 0.0

    table[tiny_dataset.user_indices, tiny_dataset.item_indices] += 0.5
    assert mae(TablePredictor(table), tiny_dataset) == pytest.approx(0.5)


def test_mae_of_empty_test_set(tiny_dataset):
    empty = tiny_dataset.subset(np.zeros(len(tiny_dataset), dtype=bool))
    with pytest.raises(EvaluationError):
        mae(TablePredictor(np.zeros((3, 3))), empty)


def test_zipf_exposures_give_unit_slope():
    # 27720 is divisible by every rank 1..12, so counts are exactly C / rank
    exposures = 27720 // np.arange(1, 13)
    assert matthew_effect_slope(exposures) == pytest.approx(1.0, abs=1e-9)


def test_large_zipf_tail_is_close_to_unit_slope():
    ranks = np.arange(1, 201)
    exposures = np.round(1_000_000 / ranks).astype(np.int64)
    assert matthew_effect_slope(exposures) == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize("factor", [3, 50, 10_000])
def test_dme_ignores_exposure_scale(factor):
    exposures = np.array([40, 31, 17, 17, 9, 4, 2, 1, 0, 0])
    assert matthew_effect_slope(exposures * factor) == pytest.approx(matthew_effect_slope(exposures), abs=1e-9)


def test_uniform_exposures_give_zero_slope():
    assert matthew_effect_slope(np.full(40, 25)) == pytest.approx(0.0, abs=1e-9)


def test_single_exposed_item_gives_zero():
    assert matthew_effect_slope(np.array([0, 7, 0])) == 0.0


def test_exposure_excludes_seen_items_and_breaks_ties_by_id():
    # user 0 has seen item 0; all scores tie
    train = make_dataset([(1, 1, 4.0), (2, 2, 3.0), (2, 3, 3.0), (2, 4, 3.0)])
    predictor = TablePredictor(np.full((2, 4), 3.0))

    exposures = exposure_counts(predictor, np.array([0]), train, top_k=2)

    assert exposures.tolist() == [0, 1, 1, 0]


def test_exposure_follows_predicted_order():
    train = make_dataset([(1, 1, 4.0), (2, 2, 3.0), (3, 3, 3.0), (3, 4, 2.0)])
    scores = np.array([
        [9.0, 1.0, 4.0, 2.0],
        [3.0, 9.0, 3.5, 4.5],
        [1.0, 1.0, 1.0, 1.0],
    ])
    predictor = TablePredictor(scores)
    users = np.array([0, 1])

    assert exposure_counts(predictor, users, train, top_k=1).tolist() == [0, 0, 1, 1]
    assert exposure_counts(predictor, users, train, top_k=2).tolist() == [0, 0, 2, 2]
    assert exposure_counts(predictor, users, train, top_k=3).tolist() == [1, 1, 2, 2]


def test_users_with_nothing_unseen_are_skipped():
    train = make_dataset([(1, 1, 4.0), (1, 2, 3.0), (2, 1, 5.0)])
    predictor = TablePredictor(np.array([[1.0, 2.0], [1.0, 2.0]]))

    exposures = exposure_counts(predictor, np.array([0, 1]), train, top_k=5)

    assert exposures.tolist() == [0, 1]


def test_no_eligible_user_is_an_evaluation_error():
    train = make_dataset([(1, 1, 4.0), (1, 2, 3.0)])
    with pytest.raises(EvaluationError):
        exposure_counts(TablePredictor(np.ones((1, 2))), np.array([0]), train, top_k=1)


def test_top_k_must_be_positive(tiny_dataset):
    with pytest.raises(ConfigError):
        exposure_counts(TablePredictor(np.ones((3, 3))), np.array([0]), tiny_dataset, top_k=0)


def _reference_dme(scores, users, train, top_k):
    seen = set(zip(train.user_indices.tolist(), train.item_indices.tolist()))
    tally = {}
    for u in sorted(set(users)):
        unseen = [j for j in range(train.n_items) if (u, j) not in seen]
        for j in sorted(unseen, key=lambda j: (-scores[u][j], train.item_ids[j]))[:top_k]:
            tally[j] = tally.get(j, 0) + 1
    counts = sorted(tally.values(), reverse=True)
    xs = [math.log(r) for r in range(1, len(counts) + 1)]
    ys = [math.log(c) for c in counts]
    x_bar, y_bar = sum(xs) / len(xs), sum(ys) / len(ys)
    slope = sum((x - x_bar) * (y - y_bar) for x, y in zip(xs, ys)) / sum((x - x_bar) ** 2 for x in xs)
    return abs(slope)


def test_dme_matches_reference_regression(synthetic_dataset):
    rng = np.random.default_rng(4)
    scores = rng.integers(1, 6, size=(synthetic_dataset.n_users, synthetic_dataset.n_items)).astype(float)
    train, test = split(synthetic_dataset, SplitSpec(test_fraction=0.25, seed=8))
    users = np.unique(test.user_indices)

    value = degree_of_matthew_effect(TablePredictor(scores), users, train, top_k=3)

    assert value == pytest.approx(_reference_dme(scores.tolist(), users.tolist(), train, 3), rel=1e-9)


def test_expand_algorithms_with_lambda_grid():
    specs = expand_algorithms([Algorithm.MF, Algorithm.EMF, Algorithm.RANDOM], [0.0, 0.01, 0.1], 0.05)

    assert [s.algorithm for s in specs] == [Algorithm.MF] + [Algorithm.EMF] * 3 + [Algorithm.RANDOM]
    assert [s.emotion_weight for s in specs] == [None, 0.0, 0.01, 0.1, None]
    assert expand_algorithms([Algorithm.EMF], None, 0.05)[0].emotion_weight == 0.05


@pytest.fixture
def split_data(synthetic_dataset):
    return split(synthetic_dataset, SplitSpec(test_fraction=0.2, seed=2))


def test_comparison_rows_and_determinism(split_data):
    train, test = split_data
    specs = [AlgorithmSpec(algorithm=Algorithm.MF), AlgorithmSpec(algorithm=Algorithm.EMF, emotion_weight=0.01),
             AlgorithmSpec(algorithm=Algorithm.RANDOM)]
    config = ComparisonConfig(train=FAST, top_k=5, dataset_id="synthetic")

    reports = run_comparison(train, test, specs, config)
    again = run_comparison(train, test, specs, config)

    assert [r.algorithm for r in reports] == ["mf", "emf", "random"]
    assert [r.emotion_weight for r in reports] == [None, 0.01, None]
    assert all(r.seed == 11 and r.top_k == 5 and r.dataset_id == "synthetic" for r in reports)
    assert [r.model_dump() for r in reports] == [r.model_dump() for r in again]
    assert all(r.mae >= 0 and r.dme >= 0 for r in reports)


def test_dme_population_switch(split_data):
    train, test = split_data
    specs = [AlgorithmSpec(algorithm=Algorithm.RANDOM)]
    on_test = run_comparison(train, test, specs, ComparisonConfig(train=FAST, dme_users=DMEUsers.TEST))[0]
    on_all = run_comparison(train, test, specs, ComparisonConfig(train=FAST, dme_users=DMEUsers.ALL))[0]
    assert on_test.mae == on_all.mae


def test_failed_algorithms_keep_partial_reports(split_data):
    train, test = split_data
    specs = expand_algorithms([Algorithm.MF, Algorithm.RANDOM], None, 0.0)
    config = ComparisonConfig(train=FAST.model_copy(update={"learning_rate": 1e300}))

    with pytest.raises(ComparisonError) as exc_info:
        run_comparison(train, test, specs, config)

    assert list(exc_info.value.failures) == ["mf"]
    assert [r.algorithm for r in exc_info.value.reports] == ["random"]
    assert exc_info.value.exit_code == 3


def test_report_files(tmp_path, split_data):
    train, test = split_data
    specs = expand_algorithms([Algorithm.MF, Algorithm.EMF, Algorithm.RANDOM], [0.0, 0.1], 0.01)
    reports = run_comparison(train, test, specs, ComparisonConfig(train=FAST, dataset_id="synthetic"))

    csv_path = write_comparison_csv(reports, tmp_path / "comparison.csv")
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "algorithm,mae,dme,seed,lambda,dataset,top_k"
    assert len(lines) == 5
    assert lines[1].split(",")[4] == ""
    assert lines[2].split(",")[4] == "0.0"

    reloaded = read_comparison_csv(csv_path)
    assert [(r.algorithm, r.emotion_weight) for r in reloaded] == [(r.algorithm, r.emotion_weight) for r in reports]
    assert [r.mae for r in reloaded] == pytest.approx([r.mae for r in reports])

    jsonl = write_comparison_jsonl(reports, tmp_path / "comparison.jsonl").read_text(encoding="utf-8")
    assert len(jsonl.splitlines()) == 4
    assert '"config_snapshot"' in jsonl


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_fitted_models_beat_random_placement(seed, record_property):
    dataset = make_dataset(low_rank_triples(seed=seed))
    train, test = split(dataset, SplitSpec(test_fraction=0.2, seed=seed))
    specs = expand_algorithms([Algorithm.MF, Algorithm.EMF, Algorithm.RANDOM], None, 0.01)

    mf, emf, random = run_comparison(train, test, specs, ComparisonConfig(train=TrainConfig(seed=seed), top_k=5))

    assert mf.mae < random.mae
    assert emf.mae < random.mae
    # EMF accuracy drifts from MF by seed; kept for inspection, not bounded
    record_property("emf_mf_mae_ratio", abs(emf.mae - mf.mae) / mf.mae)
