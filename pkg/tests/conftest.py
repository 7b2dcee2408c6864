"""Shared synthetic data for the test suite."""
import numpy as np
import pytest

from emotion_core.models.dataset import RatingDataset
from emotion_core.services.ingest import build_dataset


class TablePredictor:
    """Predictor backed by a dense score table."""

    def __init__(self, scores, max_rating: float = 5.0):
        self.scores = np.asarray(scores, dtype=np.float64)
        self.max_rating = max_rating

    def predict(self, i: int, j: int) -> float:
        return float(self.scores[i, j])

    def predict_pairs(self, users, items):
        return self.scores[np.asarray(users), np.asarray(items)]

    def score_user(self, i: int, n_items: int):
        return self.scores[i, :n_items]


def make_dataset(triples, max_rating: float = 5.0) -> RatingDataset:
    users, items, ratings = zip(*triples)
    return build_dataset(users, items, ratings, max_rating)


def synthetic_triples(n_users: int = 30, n_items: int = 24, per_user: int = 10, seed: int = 7):
    """Every user rates ``per_user`` distinct items with integer ratings 1..5.

    Item popularity is skewed: low item ids are drawn more often.
    """
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, n_items + 1)
    weights /= weights.sum()
    triples = []
    for u in range(1, n_users + 1):
        for item in rng.choice(n_items, size=per_user, replace=False, p=weights):
            triples.append((u, int(item) + 1, float(rng.integers(1, 6))))
    return triples


def low_rank_triples(n_users: int = 80, n_items: int = 50, per_user: int = 12, rank: int = 3, seed: int = 1):
    """Ratings round(5 * cos) of hidden positive rank-``rank`` factors, skewed toward low item ids."""
    rng = np.random.default_rng(seed)
    P = rng.random((n_users, rank)) + 0.05
    Q = rng.random((n_items, rank)) + 0.05
    cosine = (P @ Q.T) / np.outer(np.linalg.norm(P, axis=1), np.linalg.norm(Q, axis=1))
    ratings = np.clip(np.rint(5.0 * cosine), 1, 5)
    weights = 1.0 / np.arange(1, n_items + 1)
    weights /= weights.sum()
    triples = []
    for u in range(n_users):
        for item in rng.choice(n_items, size=per_user, replace=False, p=weights):
            triples.append((u + 1, int(item) + 1, float(ratings[u, item])))
    return triples


@pytest.fixture
def tiny_dataset() -> RatingDataset:
    # users 10, 20, 30; items 100, 200, 300
    return make_dataset([
        (10, 100, 5.0),
        (10, 200, 3.0),
        (20, 100, 4.0),
        (20, 300, 1.0),
        (30, 200, 2.0),
        (30, 300, 5.0),
        (30, 100, 4.0),
    ])


@pytest.fixture
def synthetic_dataset() -> RatingDataset:
    return make_dataset(synthetic_triples())


@pytest.fixture
def movielens_files(tmp_path):
    """ratings.dat and movies.dat in MovieLens ``::`` format."""
    ratings = tmp_path / "ratings.dat"
    movies = tmp_path / "movies.dat"
    lines = [
        f"{u}::{i}::{int(r)}::{978300000 + k}"
        for k, (u, i, r) in enumerate(synthetic_triples(n_users=20, n_items=15, per_user=8, seed=11))
    ]
    ratings.write_text("\n".join(lines) + "\n", encoding="utf-8")
    genres = ["Action", "Comedy", "Drama|Romance", "Action|Thriller", "Animation|Children's"]
    movies.write_text(
        "".join(f"{i}::Movie {i} ({1990 + i})::{genres[i % len(genres)]}\n" for i in range(1, 16)),
        encoding="utf-8",
    )
    return ratings, movies
